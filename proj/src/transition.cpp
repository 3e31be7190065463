#include "stagecraft/transition.hpp"

#include <sstream>

namespace stagecraft {

std::strong_ordering TransitionVar::operator<=>(const TransitionVar& o) const noexcept {
  if (is_free() != o.is_free()) return is_free() ? std::strong_ordering::less : std::strong_ordering::greater;
  if (is_free()) return name_.compare(o.name_) <=> 0;
  return index_ <=> o.index_;
}

Transition Transition::of_names(const std::vector<std::string>& names) {
  std::vector<TransitionVar> vs;
  vs.reserve(names.size());
  for (const auto& n : names) vs.push_back(TransitionVar::free(n));
  return Transition(std::move(vs));
}

Transition Transition::operator+(const Transition& o) const {
  std::vector<TransitionVar> vs = vars_;
  vs.insert(vs.end(), o.vars_.begin(), o.vars_.end());
  return Transition(std::move(vs));
}

Transition Transition::operator+(const TransitionVar& v) const {
  std::vector<TransitionVar> vs = vars_;
  vs.push_back(v);
  return Transition(std::move(vs));
}

Transition Transition::drop_last() const {
  std::vector<TransitionVar> vs = vars_;
  if (!vs.empty()) vs.pop_back();
  return Transition(std::move(vs));
}

bool Transition::has_prefix(const Transition& p) const {
  if (p.size() > size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!(vars_[i] == p.vars_[i])) return false;
  return true;
}

Transition Transition::strip_prefix(const Transition& p) const {
  return Transition(std::vector<TransitionVar>(vars_.begin() + static_cast<std::ptrdiff_t>(p.size()), vars_.end()));
}

std::strong_ordering PathLetter::operator<=>(const PathLetter& o) const noexcept {
  if (auto c = var <=> o.var; c != 0) return c;
  return inverse <=> o.inverse;
}

Path::Path(const Transition& t) {
  for (const auto& v : t) letters_.push_back({v, false});
}

Path Path::from_word(const std::vector<PathLetter>& word) {
  Path p;
  for (const auto& l : word) {
    if (!p.letters_.empty() && p.letters_.back().var == l.var && p.letters_.back().inverse != l.inverse)
      p.letters_.pop_back();
    else
      p.letters_.push_back(l);
  }
  return p;
}

Path Path::letter(const TransitionVar& v, bool inverse) {
  Path p;
  p.letters_.push_back({v, inverse});
  return p;
}

bool Path::is_positive() const noexcept {
  for (const auto& l : letters_)
    if (l.inverse) return false;
  return true;
}

std::size_t Path::inverse_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : letters_) n += l.inverse ? 1 : 0;
  return n;
}

Path Path::operator*(const Path& o) const {
  std::vector<PathLetter> w = letters_;
  w.insert(w.end(), o.letters_.begin(), o.letters_.end());
  return from_word(w);
}

Path Path::inverse() const {
  Path p;
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) p.letters_.push_back({it->var, !it->inverse});
  return p;
}

bool path_leq(const Path& t, const Path& u) { return (t.inverse() * u).is_positive(); }

std::strong_ordering time_order(const Path& t, const Path& u) {
  if (auto c = u.inverse_count() <=> t.inverse_count(); c != 0) return c;
  if (auto c = t.letters().size() <=> u.letters().size(); c != 0) return c;
  return std::lexicographical_compare_three_way(t.letters().begin(), t.letters().end(), u.letters().begin(),
                                                u.letters().end());
}

std::set<std::string> fmv(const Transition& t) {
  std::set<std::string> s;
  for (const auto& v : t)
    if (v.is_free()) s.insert(v.name());
  return s;
}

std::set<std::string> fmv(const Path& p) {
  std::set<std::string> s;
  for (const auto& l : p.letters())
    if (l.var.is_free()) s.insert(l.var.name());
  return s;
}

namespace {
TransitionVar shift_var(const TransitionVar& v, std::int64_t delta, std::uint32_t cutoff) {
  if (v.is_bound() && v.index() >= cutoff) return TransitionVar::bound(static_cast<std::uint32_t>(v.index() + delta));
  return v;
}
}  // namespace

Transition shift(const Transition& t, std::int64_t delta, std::uint32_t cutoff) {
  if (delta == 0) return t;
  std::vector<TransitionVar> vs;
  vs.reserve(t.size());
  for (const auto& v : t) vs.push_back(shift_var(v, delta, cutoff));
  return Transition(std::move(vs));
}

Path shift(const Path& p, std::int64_t delta, std::uint32_t cutoff) {
  std::vector<PathLetter> w;
  for (const auto& l : p.letters()) w.push_back({shift_var(l.var, delta, cutoff), l.inverse});
  return Path::from_word(w);
}

Transition substitute(const Transition& t, const TransitionVar& target, const Transition& b) {
  std::vector<TransitionVar> vs;
  for (const auto& v : t) {
    if (v == target)
      vs.insert(vs.end(), b.begin(), b.end());
    else
      vs.push_back(v);
  }
  return Transition(std::move(vs));
}

Path substitute(const Path& p, const TransitionVar& target, const Transition& b) {
  std::vector<PathLetter> w;
  for (const auto& l : p.letters()) {
    if (!(l.var == target)) {
      w.push_back(l);
      continue;
    }
    if (l.inverse) {
      for (auto it = b.vars().rbegin(); it != b.vars().rend(); ++it) w.push_back({*it, true});
    } else {
      for (const auto& v : b) w.push_back({v, false});
    }
  }
  return Path::from_word(w);
}

Path erase_binder(const Path& p) {
  return shift(substitute(p, TransitionVar::bound(0), Transition{}), -1, 1);
}

std::ostream& operator<<(std::ostream& os, const TransitionVar& v) {
  if (v.is_free()) return os << v.name();
  return os << '#' << v.index();
}

std::ostream& operator<<(std::ostream& os, const Transition& t) {
  os << '[';
  for (std::size_t i = 0; i < t.size(); ++i) os << (i ? " " : "") << t[i];
  return os << ']';
}

std::ostream& operator<<(std::ostream& os, const Path& p) {
  if (p.is_epsilon()) return os << "eps";
  for (std::size_t i = 0; i < p.letters().size(); ++i) {
    const auto& l = p.letters()[i];
    os << (i ? " " : "") << l.var << (l.inverse ? "^-1" : "");
  }
  return os;
}

std::string to_string(const Transition& t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

std::string to_string(const Path& p) {
  std::ostringstream os;
  os << p;
  return os.str();
}

}  // namespace stagecraft
