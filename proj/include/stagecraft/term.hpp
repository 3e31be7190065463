#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "stagecraft/transition.hpp"
#include "stagecraft/type.hpp"

namespace stagecraft {

using Integer = boost::multiprecision::cpp_int;

// Term variable occurrence: free name or de Bruijn index over lambda/fix binders.
class VarRef {
 public:
  static VarRef free(std::string name) { return VarRef(std::move(name), -1); }
  static VarRef bound(std::uint32_t index) { return VarRef({}, static_cast<std::int64_t>(index)); }
  bool is_free() const noexcept { return index_ < 0; }
  bool is_bound() const noexcept { return index_ >= 0; }
  const std::string& name() const noexcept { return name_; }
  std::uint32_t index() const noexcept { return static_cast<std::uint32_t>(index_); }
  bool operator==(const VarRef& o) const noexcept { return index_ == o.index_ && (index_ >= 0 || name_ == o.name_); }

 private:
  VarRef(std::string n, std::int64_t i) : name_(std::move(n)), index_(i) {}
  std::string name_;
  std::int64_t index_;
};

enum class BinOpKind { Add, Sub, Mul, Eq };

struct TermNode;

class Term {
 public:
  struct Var {
    VarRef ref;
  };
  struct IntLit {
    Integer value;
  };
  struct BoolLit {
    bool value;
  };
  struct BinOp;
  struct If;
  struct Fix;
  struct Lam;
  struct App;
  struct Next;
  struct Prev;
  struct Gen;
  struct TApp;
  struct SIns;

  static Term var(VarRef r);
  static Term free_var(std::string name) { return var(VarRef::free(std::move(name))); }
  static Term bound_var(std::uint32_t i) { return var(VarRef::bound(i)); }
  static Term int_lit(Integer v);
  static Term bool_lit(bool v);
  static Term binop(BinOpKind op, Term l, Term r);
  static Term if_(Term c, Term t, Term e);
  static Term fix(std::string hint, Type annot, Term body);
  static Term lam(std::string hint, Type annot, Term body);
  static Term app(Term f, Term a);
  static Term next(TransitionVar v, Term body);
  static Term prev(TransitionVar v, Term body);
  // next over a sequence: next[a1](next[a2](... body)).
  static Term next(const Transition& path, Term body);
  // prev over a sequence: prev[an](... prev[a1] body).
  static Term prev(const Transition& path, Term body);
  static Term gen(std::string hint, Term body);
  static Term tapp(Term body, Transition arg);
  static Term sins(Term body, TransitionVar arg);

  template <class N>
  const N* as() const;
  template <class N>
  bool is() const {
    return as<N>() != nullptr;
  }
  const TermNode& node() const { return *node_; }
  const void* identity() const { return node_.get(); }

 private:
  explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TermNode> node_;
};

struct Term::BinOp {
  BinOpKind op;
  Term lhs;
  Term rhs;
};
struct Term::If {
  Term cond;
  Term then_branch;
  Term else_branch;
};
struct Term::Fix {
  std::string hint;
  Type annot;
  Term body;
};
struct Term::Lam {
  std::string hint;
  Type annot;
  Term body;
};
struct Term::App {
  Term fn;
  Term arg;
};
struct Term::Next {
  TransitionVar var;
  Term body;
};
struct Term::Prev {
  TransitionVar var;
  Term body;
};
struct Term::Gen {
  std::string hint;
  Term body;
};
struct Term::TApp {
  Term body;
  Transition arg;
};
struct Term::SIns {
  Term body;
  TransitionVar arg;
};

struct TermNode {
  std::variant<Term::Var, Term::IntLit, Term::BoolLit, Term::BinOp, Term::If, Term::Fix, Term::Lam, Term::App,
               Term::Next, Term::Prev, Term::Gen, Term::TApp, Term::SIns>
      v;
};

template <class N>
const N* Term::as() const {
  return std::get_if<N>(&node_->v);
}

// Alpha-equivalence (structural equality on the nameless representation).
bool operator==(const Term& a, const Term& b);
inline bool alpha_equiv(const Term& a, const Term& b) { return a == b; }
std::size_t hash_value(const Term& t);

// Tree address of a subterm: child indices from the root.
using Position = std::vector<std::uint32_t>;

std::vector<Term> children(const Term& t);
Term with_children(const Term& t, const std::vector<Term>& kids);
Term subterm_at(const Term& t, const Position& p);

using VarMap = std::function<Term(const VarRef& v, std::uint32_t term_depth, std::uint32_t trans_depth)>;

// Generic rebuild; either map may be empty.
Term map_term(const Term& t, const VarMap& on_var, const TVarMap& on_tvar, std::uint32_t term_depth = 0,
              std::uint32_t trans_depth = 0);

Term shift_terms(const Term& t, std::int64_t delta, std::uint32_t cutoff = 0);
Term shift_transitions(const Term& t, std::int64_t delta, std::uint32_t cutoff = 0);

// M[x := N] for a free term variable x.
Term substitute(const Term& m, const std::string& x, const Term& n);
// M[alpha := B] for a transition variable (free name or bound index).
Term substitute(const Term& m, const TransitionVar& target, const Transition& b);
// Body of a lambda or fix with its bound variable replaced by n.
Term open_term(const Term& body, const Term& n);
// Body of a gen with its bound transition variable replaced by b.
Term open_transition(const Term& body, const Transition& b);
// Abstract a free term variable / transition name into a new outermost binder.
Term abstract_term(const Term& t, const std::string& name);
Term abstract_transition(const Term& t, const std::string& name);

std::set<std::string> fmv(const Term& t);
std::set<std::string> free_term_vars(const Term& t);
std::size_t term_size(const Term& t);
bool is_locally_closed(const Term& t);
bool mentions_bound_transition(const Term& t, std::uint32_t index);

// Natural projection: erase next, prev, gen and instantiation.
Term natural_projection(const Term& t);
// Map staged annotations away: forall@A to forall, single-variable staged
// instantiation to ordinary instantiation.
Term strip_stages(const Term& t);

}  // namespace stagecraft

template <>
struct std::hash<stagecraft::Term> {
  std::size_t operator()(const stagecraft::Term& t) const { return stagecraft::hash_value(t); }
};
