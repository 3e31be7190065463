#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>

#include "stagecraft/transition.hpp"

namespace stagecraft {

struct TypeNode;

// Immutable, shared type tree. Also used for propositions (with bot) and for
// staged types (forall carrying a declaration stage).
class Type {
 public:
  struct Base {
    std::string name;
  };
  struct Int {};
  struct Bool {};
  struct Bot {};
  struct Arrow;
  struct Code;
  struct Forall;

  static Type base(std::string name);
  static Type integer();
  static Type boolean();
  static Type bot();
  static Type arrow(Type dom, Type cod);
  static Type code(TransitionVar var, Type body);
  // Nested code type <a1>(<a2>(... body)); epsilon gives body.
  static Type code(const Transition& path, Type body);
  static Type forall(std::string hint, Type body);
  static Type forall_at(std::string hint, Transition stage, Type body);
  static Type negation(Type t) { return arrow(std::move(t), bot()); }

  template <class N>
  const N* as() const;
  template <class N>
  bool is() const {
    return as<N>() != nullptr;
  }
  const TypeNode& node() const { return *node_; }
  const void* identity() const { return node_.get(); }

 private:
  explicit Type(std::shared_ptr<const TypeNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TypeNode> node_;
};

struct Type::Arrow {
  Type dom;
  Type cod;
};
struct Type::Code {
  TransitionVar var;
  Type body;
};
struct Type::Forall {
  std::string hint;
  std::optional<Transition> stage;
  Type body;
};

struct TypeNode {
  std::variant<Type::Base, Type::Int, Type::Bool, Type::Bot, Type::Arrow, Type::Code, Type::Forall> v;
};

template <class N>
const N* Type::as() const {
  return std::get_if<N>(&node_->v);
}

// Structural equality; binder hints are ignored, so this is alpha-equivalence.
bool operator==(const Type& a, const Type& b);
std::size_t hash_value(const Type& t);

using TVarMap = std::function<Transition(const TransitionVar& v, std::uint32_t depth)>;
// Rebuild t replacing each transition variable occurrence; depth counts the
// forall binders passed on the way down.
Type map_tvars(const Type& t, const TVarMap& f, std::uint32_t depth = 0);

Type shift(const Type& t, std::int64_t delta, std::uint32_t cutoff = 0);
Type substitute(const Type& t, const TransitionVar& target, const Transition& b);
// Body of forall instantiated with b.
Type instantiate(const Type& forall_body, const Transition& b);
// Abstract the free variable `name` into a fresh outermost binder index.
Type abstract(const Type& t, const std::string& name);

std::set<std::string> fmv(const Type& t);
bool has_bound_index(const Type& t, std::uint32_t index);
// Forget staged annotations on forall.
Type strip_stages(const Type& t);
bool is_staged(const Type& t);
// Natural projection: erase code types and quantifiers.
Type natural_projection(const Type& t);
std::size_t type_size(const Type& t);

}  // namespace stagecraft

template <>
struct std::hash<stagecraft::Type> {
  std::size_t operator()(const stagecraft::Type& t) const { return stagecraft::hash_value(t); }
};
