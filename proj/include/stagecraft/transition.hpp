#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace stagecraft {

// Occurrence of a transition variable. Free variables carry a name; variables
// bound by an enclosing gen or forall carry a de Bruijn index.
class TransitionVar {
 public:
  static TransitionVar free(std::string name) { return TransitionVar(std::move(name), -1); }
  static TransitionVar bound(std::uint32_t index) {
    return TransitionVar({}, static_cast<std::int64_t>(index));
  }

  bool is_free() const noexcept { return index_ < 0; }
  bool is_bound() const noexcept { return index_ >= 0; }
  const std::string& name() const noexcept { return name_; }
  std::uint32_t index() const noexcept { return static_cast<std::uint32_t>(index_); }

  bool operator==(const TransitionVar& o) const noexcept {
    return index_ == o.index_ && (index_ >= 0 || name_ == o.name_);
  }
  std::strong_ordering operator<=>(const TransitionVar& o) const noexcept;

 private:
  TransitionVar(std::string name, std::int64_t index) : name_(std::move(name)), index_(index) {}
  std::string name_;
  std::int64_t index_;
};

// A finite sequence of transition variables; the empty sequence is epsilon.
class Transition {
 public:
  Transition() = default;
  Transition(std::initializer_list<TransitionVar> vars) : vars_(vars) {}
  explicit Transition(std::vector<TransitionVar> vars) : vars_(std::move(vars)) {}
  static Transition of_names(const std::vector<std::string>& names);

  bool empty() const noexcept { return vars_.empty(); }
  std::size_t size() const noexcept { return vars_.size(); }
  const TransitionVar& operator[](std::size_t i) const { return vars_[i]; }
  const TransitionVar& last() const { return vars_.back(); }
  auto begin() const noexcept { return vars_.begin(); }
  auto end() const noexcept { return vars_.end(); }
  const std::vector<TransitionVar>& vars() const noexcept { return vars_; }

  Transition operator+(const Transition& o) const;
  Transition operator+(const TransitionVar& v) const;
  Transition drop_last() const;
  bool has_prefix(const Transition& p) const;
  // Requires has_prefix(p).
  Transition strip_prefix(const Transition& p) const;

  bool operator==(const Transition&) const = default;
  auto operator<=>(const Transition&) const = default;

 private:
  std::vector<TransitionVar> vars_;
};

struct PathLetter {
  TransitionVar var;
  bool inverse = false;
  bool operator==(const PathLetter&) const = default;
  std::strong_ordering operator<=>(const PathLetter& o) const noexcept;
};

// Element of the free group over transition variables, always kept in
// canonical (fully cancelled) form.
class Path {
 public:
  Path() = default;
  explicit Path(const Transition& t);
  static Path from_word(const std::vector<PathLetter>& word);
  static Path letter(const TransitionVar& v, bool inverse = false);

  const std::vector<PathLetter>& letters() const noexcept { return letters_; }
  bool is_epsilon() const noexcept { return letters_.empty(); }
  bool is_positive() const noexcept;
  std::size_t inverse_count() const noexcept;

  Path operator*(const Path& o) const;
  Path inverse() const;

  bool operator==(const Path&) const = default;

 private:
  std::vector<PathLetter> letters_;
};

// T <= U iff T^-1 U is positive.
bool path_leq(const Path& t, const Path& u);

// Total time order: more inverse letters first, then shorter, then
// lexicographic on letters. Refines path_leq.
std::strong_ordering time_order(const Path& t, const Path& u);

std::set<std::string> fmv(const Transition& t);
std::set<std::string> fmv(const Path& p);

// Shift bound indices >= cutoff by delta.
Transition shift(const Transition& t, std::int64_t delta, std::uint32_t cutoff = 0);
Path shift(const Path& p, std::int64_t delta, std::uint32_t cutoff = 0);

// Replace every occurrence of target by the sequence b.
Transition substitute(const Transition& t, const TransitionVar& target, const Transition& b);
Path substitute(const Path& p, const TransitionVar& target, const Transition& b);
// Drop bound index 0 and decrement the remaining bound indices.
Path erase_binder(const Path& p);

std::ostream& operator<<(std::ostream& os, const TransitionVar& v);
std::ostream& operator<<(std::ostream& os, const Transition& t);
std::ostream& operator<<(std::ostream& os, const Path& p);
std::string to_string(const Transition& t);
std::string to_string(const Path& p);

}  // namespace stagecraft
