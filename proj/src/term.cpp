#include "stagecraft/term.hpp"

#include <boost/container_hash/hash.hpp>
#include <stdexcept>

namespace stagecraft {

#define STAGECRAFT_MAKE(...) Term(std::make_shared<TermNode>(TermNode{__VA_ARGS__}))

Term Term::var(VarRef r) { return STAGECRAFT_MAKE(Var{std::move(r)}); }
Term Term::int_lit(Integer v) { return STAGECRAFT_MAKE(IntLit{std::move(v)}); }
Term Term::bool_lit(bool v) { return STAGECRAFT_MAKE(BoolLit{v}); }
Term Term::binop(BinOpKind op, Term l, Term r) { return STAGECRAFT_MAKE(BinOp{op, std::move(l), std::move(r)}); }
Term Term::if_(Term c, Term t, Term e) { return STAGECRAFT_MAKE(If{std::move(c), std::move(t), std::move(e)}); }
Term Term::fix(std::string hint, Type annot, Term body) {
  return STAGECRAFT_MAKE(Fix{std::move(hint), std::move(annot), std::move(body)});
}
Term Term::lam(std::string hint, Type annot, Term body) {
  return STAGECRAFT_MAKE(Lam{std::move(hint), std::move(annot), std::move(body)});
}
Term Term::app(Term f, Term a) { return STAGECRAFT_MAKE(App{std::move(f), std::move(a)}); }
Term Term::next(TransitionVar v, Term body) { return STAGECRAFT_MAKE(Next{std::move(v), std::move(body)}); }
Term Term::prev(TransitionVar v, Term body) { return STAGECRAFT_MAKE(Prev{std::move(v), std::move(body)}); }
Term Term::gen(std::string hint, Term body) { return STAGECRAFT_MAKE(Gen{std::move(hint), std::move(body)}); }
Term Term::tapp(Term body, Transition arg) { return STAGECRAFT_MAKE(TApp{std::move(body), std::move(arg)}); }
Term Term::sins(Term body, TransitionVar arg) { return STAGECRAFT_MAKE(SIns{std::move(body), std::move(arg)}); }

#undef STAGECRAFT_MAKE

Term Term::next(const Transition& path, Term body) {
  for (auto it = path.vars().rbegin(); it != path.vars().rend(); ++it) body = next(*it, std::move(body));
  return body;
}

Term Term::prev(const Transition& path, Term body) {
  for (const auto& v : path) body = prev(v, std::move(body));
  return body;
}

bool operator==(const Term& a, const Term& b) {
  if (a.identity() == b.identity()) return true;
  if (a.node().v.index() != b.node().v.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using N = std::decay_t<decltype(x)>;
        const N& y = *b.as<N>();
        if constexpr (std::is_same_v<N, Term::Var>) {
          return x.ref == y.ref;
        } else if constexpr (std::is_same_v<N, Term::IntLit> || std::is_same_v<N, Term::BoolLit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<N, Term::BinOp>) {
          return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
        } else if constexpr (std::is_same_v<N, Term::If>) {
          return x.cond == y.cond && x.then_branch == y.then_branch && x.else_branch == y.else_branch;
        } else if constexpr (std::is_same_v<N, Term::Fix> || std::is_same_v<N, Term::Lam>) {
          return x.annot == y.annot && x.body == y.body;
        } else if constexpr (std::is_same_v<N, Term::App>) {
          return x.fn == y.fn && x.arg == y.arg;
        } else if constexpr (std::is_same_v<N, Term::Next> || std::is_same_v<N, Term::Prev>) {
          return x.var == y.var && x.body == y.body;
        } else if constexpr (std::is_same_v<N, Term::Gen>) {
          return x.body == y.body;
        } else {
          return x.arg == y.arg && x.body == y.body;
        }
      },
      a.node().v);
}

namespace {
void hash_tvar(std::size_t& seed, const TransitionVar& v) {
  boost::hash_combine(seed, v.is_free());
  if (v.is_free())
    boost::hash_combine(seed, v.name());
  else
    boost::hash_combine(seed, v.index());
}
}  // namespace

std::size_t hash_value(const Term& t) {
  std::size_t seed = t.node().v.index() * 0x9e3779b97f4a7c15ULL;
  std::visit(
      [&](const auto& x) {
        using N = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<N, Term::Var>) {
          boost::hash_combine(seed, x.ref.is_free());
          if (x.ref.is_free())
            boost::hash_combine(seed, x.ref.name());
          else
            boost::hash_combine(seed, x.ref.index());
        } else if constexpr (std::is_same_v<N, Term::IntLit>) {
          boost::hash_combine(seed, x.value.str());
        } else if constexpr (std::is_same_v<N, Term::BoolLit>) {
          boost::hash_combine(seed, x.value);
        } else if constexpr (std::is_same_v<N, Term::BinOp>) {
          boost::hash_combine(seed, static_cast<int>(x.op));
          boost::hash_combine(seed, hash_value(x.lhs));
          boost::hash_combine(seed, hash_value(x.rhs));
        } else if constexpr (std::is_same_v<N, Term::If>) {
          boost::hash_combine(seed, hash_value(x.cond));
          boost::hash_combine(seed, hash_value(x.then_branch));
          boost::hash_combine(seed, hash_value(x.else_branch));
        } else if constexpr (std::is_same_v<N, Term::Fix> || std::is_same_v<N, Term::Lam>) {
          boost::hash_combine(seed, hash_value(x.annot));
          boost::hash_combine(seed, hash_value(x.body));
        } else if constexpr (std::is_same_v<N, Term::App>) {
          boost::hash_combine(seed, hash_value(x.fn));
          boost::hash_combine(seed, hash_value(x.arg));
        } else if constexpr (std::is_same_v<N, Term::Next> || std::is_same_v<N, Term::Prev>) {
          hash_tvar(seed, x.var);
          boost::hash_combine(seed, hash_value(x.body));
        } else if constexpr (std::is_same_v<N, Term::Gen>) {
          boost::hash_combine(seed, hash_value(x.body));
        } else if constexpr (std::is_same_v<N, Term::TApp>) {
          for (const auto& v : x.arg) hash_tvar(seed, v);
          boost::hash_combine(seed, x.arg.size());
          boost::hash_combine(seed, hash_value(x.body));
        } else {
          hash_tvar(seed, x.arg);
          boost::hash_combine(seed, hash_value(x.body));
        }
      },
      t.node().v);
  return seed;
}

std::vector<Term> children(const Term& t) {
  return std::visit(
      [&](const auto& x) -> std::vector<Term> {
        using N = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<N, Term::BinOp>) {
          return {x.lhs, x.rhs};
        } else if constexpr (std::is_same_v<N, Term::If>) {
          return {x.cond, x.then_branch, x.else_branch};
        } else if constexpr (std::is_same_v<N, Term::App>) {
          return {x.fn, x.arg};
        } else if constexpr (std::is_same_v<N, Term::Var> || std::is_same_v<N, Term::IntLit> ||
                             std::is_same_v<N, Term::BoolLit>) {
          return {};
        } else {
          return {x.body};
        }
      },
      t.node().v);
}

Term with_children(const Term& t, const std::vector<Term>& k) {
  return std::visit(
      [&](const auto& x) -> Term {
        using N = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<N, Term::BinOp>) {
          return Term::binop(x.op, k.at(0), k.at(1));
        } else if constexpr (std::is_same_v<N, Term::If>) {
          return Term::if_(k.at(0), k.at(1), k.at(2));
        } else if constexpr (std::is_same_v<N, Term::App>) {
          return Term::app(k.at(0), k.at(1));
        } else if constexpr (std::is_same_v<N, Term::Fix>) {
          return Term::fix(x.hint, x.annot, k.at(0));
        } else if constexpr (std::is_same_v<N, Term::Lam>) {
          return Term::lam(x.hint, x.annot, k.at(0));
        } else if constexpr (std::is_same_v<N, Term::Next>) {
          return Term::next(x.var, k.at(0));
        } else if constexpr (std::is_same_v<N, Term::Prev>) {
          return Term::prev(x.var, k.at(0));
        } else if constexpr (std::is_same_v<N, Term::Gen>) {
          return Term::gen(x.hint, k.at(0));
        } else if constexpr (std::is_same_v<N, Term::TApp>) {
          return Term::tapp(k.at(0), x.arg);
        } else if constexpr (std::is_same_v<N, Term::SIns>) {
          return Term::sins(k.at(0), x.arg);
        } else {
          return t;
        }
      },
      t.node().v);
}

Term subterm_at(const Term& t, const Position& p) {
  Term cur = t;
  for (auto i : p) cur = children(cur).at(i);
  return cur;
}

Term map_term(const Term& t, const VarMap& on_var, const TVarMap& on_tvar, std::uint32_t td, std::uint32_t trd) {
  auto rec = [&](const Term& s, std::uint32_t dtd, std::uint32_t dtrd) {
    return map_term(s, on_var, on_tvar, td + dtd, trd + dtrd);
  };
  auto map_type = [&](const Type& ty) { return on_tvar ? map_tvars(ty, on_tvar, trd) : ty; };
  auto map_tv = [&](const TransitionVar& v) { return on_tvar ? on_tvar(v, trd) : Transition{v}; };
  return std::visit(
      [&](const auto& x) -> Term {
        using N = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<N, Term::Var>) {
          return on_var ? on_var(x.ref, td, trd) : t;
        } else if constexpr (std::is_same_v<N, Term::IntLit> || std::is_same_v<N, Term::BoolLit>) {
          return t;
        } else if constexpr (std::is_same_v<N, Term::BinOp>) {
          return Term::binop(x.op, rec(x.lhs, 0, 0), rec(x.rhs, 0, 0));
        } else if constexpr (std::is_same_v<N, Term::If>) {
          return Term::if_(rec(x.cond, 0, 0), rec(x.then_branch, 0, 0), rec(x.else_branch, 0, 0));
        } else if constexpr (std::is_same_v<N, Term::Fix>) {
          return Term::fix(x.hint, map_type(x.annot), rec(x.body, 1, 0));
        } else if constexpr (std::is_same_v<N, Term::Lam>) {
          return Term::lam(x.hint, map_type(x.annot), rec(x.body, 1, 0));
        } else if constexpr (std::is_same_v<N, Term::App>) {
          return Term::app(rec(x.fn, 0, 0), rec(x.arg, 0, 0));
        } else if constexpr (std::is_same_v<N, Term::Next>) {
          return Term::next(map_tv(x.var), rec(x.body, 0, 0));
        } else if constexpr (std::is_same_v<N, Term::Prev>) {
          return Term::prev(map_tv(x.var), rec(x.body, 0, 0));
        } else if constexpr (std::is_same_v<N, Term::Gen>) {
          return Term::gen(x.hint, rec(x.body, 0, 1));
        } else if constexpr (std::is_same_v<N, Term::TApp>) {
          std::vector<TransitionVar> vs;
          for (const auto& v : x.arg) {
            Transition r = map_tv(v);
            vs.insert(vs.end(), r.begin(), r.end());
          }
          return Term::tapp(rec(x.body, 0, 0), Transition(std::move(vs)));
        } else {
          Transition r = map_tv(x.arg);
          // Substituting a sequence of length != 1 leaves the staged fragment;
          // the result is an ordinary instantiation.
          if (r.size() == 1) return Term::sins(rec(x.body, 0, 0), r[0]);
          return Term::tapp(rec(x.body, 0, 0), r);
        }
      },
      t.node().v);
}

Term shift_terms(const Term& t, std::int64_t delta, std::uint32_t cutoff) {
  if (delta == 0) return t;
  return map_term(
      t,
      [&](const VarRef& v, std::uint32_t td, std::uint32_t) {
        if (v.is_bound() && v.index() >= cutoff + td)
          return Term::bound_var(static_cast<std::uint32_t>(v.index() + delta));
        return Term::var(v);
      },
      {});
}

Term shift_transitions(const Term& t, std::int64_t delta, std::uint32_t cutoff) {
  if (delta == 0) return t;
  return map_term(t, {}, [&](const TransitionVar& v, std::uint32_t d) {
    if (v.is_bound() && v.index() >= cutoff + d)
      return Transition{TransitionVar::bound(static_cast<std::uint32_t>(v.index() + delta))};
    return Transition{v};
  });
}

Term substitute(const Term& m, const std::string& x, const Term& n) {
  return map_term(
      m,
      [&](const VarRef& v, std::uint32_t td, std::uint32_t trd) {
        if (v.is_free() && v.name() == x) return shift_transitions(shift_terms(n, td), trd);
        return Term::var(v);
      },
      {});
}

Term substitute(const Term& m, const TransitionVar& target, const Transition& b) {
  return map_term(m, {}, [&](const TransitionVar& v, std::uint32_t d) {
    if (target.is_free() ? v == target : (v.is_bound() && v.index() == target.index() + d)) return shift(b, d);
    return Transition{v};
  });
}

Term open_term(const Term& body, const Term& n) {
  return map_term(
      body,
      [&](const VarRef& v, std::uint32_t td, std::uint32_t trd) {
        if (v.is_bound()) {
          if (v.index() == td) return shift_transitions(shift_terms(n, td), trd);
          if (v.index() > td) return Term::bound_var(v.index() - 1);
        }
        return Term::var(v);
      },
      {});
}

Term open_transition(const Term& body, const Transition& b) {
  return map_term(body, {}, [&](const TransitionVar& v, std::uint32_t d) {
    if (v.is_bound()) {
      if (v.index() == d) return shift(b, d);
      if (v.index() > d) return Transition{TransitionVar::bound(v.index() - 1)};
    }
    return Transition{v};
  });
}

Term abstract_term(const Term& t, const std::string& name) {
  return map_term(
      t,
      [&](const VarRef& v, std::uint32_t td, std::uint32_t) {
        if (v.is_bound() && v.index() >= td) return Term::bound_var(v.index() + 1);
        if (v.is_free() && v.name() == name) return Term::bound_var(td);
        return Term::var(v);
      },
      {});
}

Term abstract_transition(const Term& t, const std::string& name) {
  return map_term(t, {}, [&](const TransitionVar& v, std::uint32_t d) {
    if (v.is_bound() && v.index() >= d) return Transition{TransitionVar::bound(v.index() + 1)};
    if (v.is_free() && v.name() == name) return Transition{TransitionVar::bound(d)};
    return Transition{v};
  });
}

std::set<std::string> fmv(const Term& t) {
  std::set<std::string> out;
  map_term(t, {}, [&](const TransitionVar& v, std::uint32_t) {
    if (v.is_free()) out.insert(v.name());
    return Transition{v};
  });
  return out;
}

std::set<std::string> free_term_vars(const Term& t) {
  std::set<std::string> out;
  map_term(
      t,
      [&](const VarRef& v, std::uint32_t, std::uint32_t) {
        if (v.is_free()) out.insert(v.name());
        return Term::var(v);
      },
      {});
  return out;
}

std::size_t term_size(const Term& t) {
  std::size_t n = 1;
  for (const auto& c : children(t)) n += term_size(c);
  return n;
}

bool is_locally_closed(const Term& t) {
  bool ok = true;
  map_term(
      t,
      [&](const VarRef& v, std::uint32_t td, std::uint32_t) {
        if (v.is_bound() && v.index() >= td) ok = false;
        return Term::var(v);
      },
      [&](const TransitionVar& v, std::uint32_t d) {
        if (v.is_bound() && v.index() >= d) ok = false;
        return Transition{v};
      });
  return ok;
}

bool mentions_bound_transition(const Term& t, std::uint32_t index) {
  bool found = false;
  map_term(t, {}, [&](const TransitionVar& v, std::uint32_t d) {
    if (v.is_bound() && v.index() == index + d) found = true;
    return Transition{v};
  });
  return found;
}

Term natural_projection(const Term& t) {
  return std::visit(
      [&](const auto& x) -> Term {
        using N = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<N, Term::Next> || std::is_same_v<N, Term::Prev> ||
                      std::is_same_v<N, Term::Gen> || std::is_same_v<N, Term::TApp> ||
                      std::is_same_v<N, Term::SIns>) {
          return natural_projection(x.body);
        } else if constexpr (std::is_same_v<N, Term::Lam>) {
          return Term::lam(x.hint, natural_projection(x.annot), natural_projection(x.body));
        } else if constexpr (std::is_same_v<N, Term::Fix>) {
          return Term::fix(x.hint, natural_projection(x.annot), natural_projection(x.body));
        } else {
          std::vector<Term> k = children(t);
          for (auto& c : k) c = natural_projection(c);
          return with_children(t, k);
        }
      },
      t.node().v);
}

Term strip_stages(const Term& t) {
  return std::visit(
      [&](const auto& x) -> Term {
        using N = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<N, Term::SIns>) {
          return Term::tapp(strip_stages(x.body), Transition{x.arg});
        } else if constexpr (std::is_same_v<N, Term::Lam>) {
          return Term::lam(x.hint, strip_stages(x.annot), strip_stages(x.body));
        } else if constexpr (std::is_same_v<N, Term::Fix>) {
          return Term::fix(x.hint, strip_stages(x.annot), strip_stages(x.body));
        } else {
          std::vector<Term> k = children(t);
          for (auto& c : k) c = strip_stages(c);
          return with_children(t, k);
        }
      },
      t.node().v);
}

}  // namespace stagecraft
