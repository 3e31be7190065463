#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "stagecraft/transition.hpp"
#include "stagecraft/type.hpp"

namespace stagecraft {

struct Binding {
  Type type;
  Transition stage;
};

// Finite map from term variable names to (type, stage).
class TypingContext {
 public:
  TypingContext() = default;

  TypingContext& bind(const std::string& x, Type t, Transition stage) {
    entries_.insert_or_assign(x, Binding{std::move(t), std::move(stage)});
    return *this;
  }
  const Binding* lookup(const std::string& x) const {
    auto it = entries_.find(x);
    return it == entries_.end() ? nullptr : &it->second;
  }
  const std::map<std::string, Binding>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  // No variable declared at the empty stage.
  bool is_epsilon_free() const {
    for (const auto& [_, b] : entries_)
      if (b.stage.empty()) return false;
    return true;
  }
  std::set<std::string> fmv() const;

 private:
  std::map<std::string, Binding> entries_;
};

// Context restricted to variables whose stage starts with prefix, with the
// prefix removed.
TypingContext restrict_context(const TypingContext& g, const Transition& prefix);

// Declaration stages of transition variables for the staged system.
class TransitionEnv {
 public:
  TransitionEnv& declare(const std::string& a, Transition stage) {
    entries_.insert_or_assign(a, std::move(stage));
    return *this;
  }
  const Transition* lookup(const std::string& a) const {
    auto it = entries_.find(a);
    return it == entries_.end() ? nullptr : &it->second;
  }
  const std::map<std::string, Transition>& entries() const { return entries_; }

 private:
  std::map<std::string, Transition> entries_;
};

}  // namespace stagecraft
