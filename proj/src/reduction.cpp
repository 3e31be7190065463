#include "stagecraft/reduction.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace stagecraft {

const char* to_string(RedexRule r) {
  switch (r) {
    case RedexRule::Beta: return "beta";
    case RedexRule::Ins: return "ins";
    case RedexRule::Quote: return "quote";
  }
  return "?";
}

namespace {

struct LocalRedex {
  Path path;
  Position position;
  Term reduct;  // replacement for the subterm at position
  RedexRule rule;
};

std::optional<LocalRedex> root_redex(const Term& t) {
  if (const auto* a = t.as<Term::App>()) {
    if (const auto* l = a->fn.as<Term::Lam>()) return LocalRedex{{}, {}, open_term(l->body, a->arg), RedexRule::Beta};
  } else if (const auto* i = t.as<Term::TApp>()) {
    if (const auto* g = i->body.as<Term::Gen>())
      return LocalRedex{{}, {}, open_transition(g->body, i->arg), RedexRule::Ins};
  } else if (const auto* s = t.as<Term::SIns>()) {
    if (const auto* g = s->body.as<Term::Gen>())
      return LocalRedex{{}, {}, open_transition(g->body, Transition{s->arg}), RedexRule::Ins};
  } else if (const auto* p = t.as<Term::Prev>()) {
    if (const auto* n = p->body.as<Term::Next>(); n && n->var == p->var)
      return LocalRedex{Path::letter(p->var, true), {}, n->body, RedexRule::Quote};
  }
  return std::nullopt;
}

void collect(const Term& t, std::vector<LocalRedex>& out) {
  if (auto r = root_redex(t)) out.push_back(std::move(*r));
  std::vector<Term> kids = children(t);
  for (std::uint32_t i = 0; i < kids.size(); ++i) {
    std::size_t first = out.size();
    collect(kids[i], out);
    for (std::size_t k = first; k < out.size(); ++k) {
      LocalRedex& r = out[k];
      r.position.insert(r.position.begin(), i);
      if (const auto* n = t.as<Term::Next>())
        r.path = Path::letter(n->var) * r.path;
      else if (const auto* p = t.as<Term::Prev>())
        r.path = Path::letter(p->var, true) * r.path;
      else if (t.is<Term::Gen>())
        r.path = erase_binder(r.path);
    }
  }
}

}  // namespace

Term replace_at(const Term& m, const Position& p, const Term& replacement) {
  if (p.empty()) return replacement;
  std::vector<Term> kids = children(m);
  Position rest(p.begin() + 1, p.end());
  kids.at(p[0]) = replace_at(kids.at(p[0]), rest, replacement);
  return with_children(m, kids);
}

std::vector<AnnotatedStep> redexes(const Term& m) {
  std::vector<LocalRedex> local;
  collect(m, local);
  std::vector<AnnotatedStep> out;
  out.reserve(local.size());
  for (auto& r : local) out.push_back({r.path, r.position, replace_at(m, r.position, r.reduct), r.rule});
  return out;
}

std::optional<AnnotatedStep> step(const Term& m) {
  std::vector<LocalRedex> local;
  collect(m, local);
  if (local.empty()) return std::nullopt;
  auto& r = local.front();
  return AnnotatedStep{r.path, r.position, replace_at(m, r.position, r.reduct), r.rule};
}

NormalizeResult normalize(const Term& m, std::size_t fuel) {
  NormalizeResult res;
  Term cur = m;
  for (std::size_t i = 0;; ++i) {
    auto s = step(cur);
    if (!s) {
      res.normal_form = cur;
      return res;
    }
    if (i >= fuel) return res;
    cur = s->result;
    res.trace.push_back(std::move(*s));
  }
}

NormalizeResult time_ordered_sequence(const Term& m, std::size_t fuel) {
  NormalizeResult res;
  Term cur = m;
  for (std::size_t i = 0;; ++i) {
    std::vector<LocalRedex> local;
    collect(cur, local);
    if (local.empty()) {
      res.normal_form = cur;
      break;
    }
    if (i >= fuel) break;
    auto best = std::min_element(local.begin(), local.end(), [](const LocalRedex& a, const LocalRedex& b) {
      return time_order(a.path, b.path) < 0;
    });
    cur = replace_at(cur, best->position, best->reduct);
    res.trace.push_back({best->path, best->position, cur, best->rule});
  }
  for (const auto& a : res.trace)
    for (const auto& b : res.trace)
      if (path_leq(a.path, b.path) && time_order(a.path, b.path) > 0)
        throw std::logic_error("time order does not refine the path order on " + to_string(a.path) + ", " +
                               to_string(b.path));
  return res;
}

namespace {

// Length of the prev chain at t and, when the chain is followed by matching
// nexts (innermost prev against outermost next), the term under them.
std::optional<Term> match_quote_chain(const Term& t) {
  std::vector<TransitionVar> chain;
  Term cur = t;
  while (const auto* p = cur.as<Term::Prev>()) {
    chain.push_back(p->var);
    cur = p->body;
  }
  if (chain.empty()) return std::nullopt;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const auto* n = cur.as<Term::Next>();
    if (!n || !(n->var == *it)) return std::nullopt;
    cur = n->body;
  }
  return cur;
}

}  // namespace

Term complete_development(const Term& t) {
  if (const auto* a = t.as<Term::App>()) {
    if (const auto* l = a->fn.as<Term::Lam>())
      return open_term(complete_development(l->body), complete_development(a->arg));
  } else if (const auto* i = t.as<Term::TApp>()) {
    if (const auto* g = i->body.as<Term::Gen>()) return open_transition(complete_development(g->body), i->arg);
  } else if (const auto* s = t.as<Term::SIns>()) {
    if (const auto* g = s->body.as<Term::Gen>())
      return open_transition(complete_development(g->body), Transition{s->arg});
  } else if (t.is<Term::Prev>()) {
    if (auto inner = match_quote_chain(t)) return complete_development(*inner);
  }
  std::vector<Term> kids = children(t);
  for (auto& k : kids) k = complete_development(k);
  return with_children(t, kids);
}

namespace {

class ReductSet {
 public:
  explicit ReductSet(std::size_t cap) : cap_(cap) {}
  void add(const Term& t) {
    if (seen_.insert(t).second) {
      items_.push_back(t);
      if (items_.size() > cap_) throw std::length_error("too many parallel reducts");
    }
  }
  std::vector<Term> take() { return std::move(items_); }

 private:
  std::size_t cap_;
  std::unordered_set<Term> seen_;
  std::vector<Term> items_;
};

std::vector<Term> enumerate(const Term& t, std::size_t cap) {
  ReductSet out(cap);
  std::vector<Term> kids = children(t);
  std::vector<std::vector<Term>> opts;
  opts.reserve(kids.size());
  for (const auto& k : kids) opts.push_back(enumerate(k, cap));
  // congruence: every combination of child reducts
  std::vector<std::size_t> idx(kids.size(), 0);
  while (true) {
    std::vector<Term> pick;
    pick.reserve(kids.size());
    for (std::size_t i = 0; i < kids.size(); ++i) pick.push_back(opts[i][idx[i]]);
    out.add(with_children(t, pick));
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == opts[i].size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }
  if (const auto* a = t.as<Term::App>()) {
    if (const auto* l = a->fn.as<Term::Lam>())
      for (const auto& b : enumerate(l->body, cap))
        for (const auto& arg : opts[1]) out.add(open_term(b, arg));
  } else if (const auto* i = t.as<Term::TApp>()) {
    if (const auto* g = i->body.as<Term::Gen>())
      for (const auto& b : enumerate(g->body, cap)) out.add(open_transition(b, i->arg));
  } else if (const auto* s = t.as<Term::SIns>()) {
    if (const auto* g = s->body.as<Term::Gen>())
      for (const auto& b : enumerate(g->body, cap)) out.add(open_transition(b, Transition{s->arg}));
  } else if (t.is<Term::Prev>()) {
    if (auto inner = match_quote_chain(t))
      for (const auto& b : enumerate(*inner, cap)) out.add(b);
  }
  return out.take();
}

bool check(const Term& m, const Term& n);

bool any_of_reducts(const Term& m, const std::function<bool(const Term&)>& pred) {
  for (const auto& r : enumerate(m, 1u << 16))
    if (pred(r)) return true;
  return false;
}

bool check(const Term& m, const Term& n) {
  if (m == n) return true;
  if (m.node().v.index() == n.node().v.index()) {
    bool same_head = std::visit(
        [&](const auto& x) -> bool {
          using N = std::decay_t<decltype(x)>;
          const N& y = *n.as<N>();
          if constexpr (std::is_same_v<N, Term::Var> || std::is_same_v<N, Term::IntLit> ||
                        std::is_same_v<N, Term::BoolLit>) {
            return false;
          } else if constexpr (std::is_same_v<N, Term::BinOp>) {
            return x.op == y.op;
          } else if constexpr (std::is_same_v<N, Term::Fix> || std::is_same_v<N, Term::Lam>) {
            return x.annot == y.annot;
          } else if constexpr (std::is_same_v<N, Term::Next> || std::is_same_v<N, Term::Prev>) {
            return x.var == y.var;
          } else if constexpr (std::is_same_v<N, Term::TApp> || std::is_same_v<N, Term::SIns>) {
            return x.arg == y.arg;
          } else {
            return true;
          }
        },
        m.node().v);
    if (same_head) {
      std::vector<Term> mk = children(m);
      std::vector<Term> nk = children(n);
      bool all = true;
      for (std::size_t i = 0; i < mk.size() && all; ++i) all = check(mk[i], nk[i]);
      if (all) return true;
    }
  }
  if (const auto* a = m.as<Term::App>()) {
    if (const auto* l = a->fn.as<Term::Lam>()) {
      std::vector<Term> args = enumerate(a->arg, 1u << 16);
      return any_of_reducts(l->body, [&](const Term& b) {
        for (const auto& arg : args)
          if (open_term(b, arg) == n) return true;
        return false;
      });
    }
  } else if (const auto* i = m.as<Term::TApp>()) {
    if (const auto* g = i->body.as<Term::Gen>())
      return any_of_reducts(g->body, [&](const Term& b) { return open_transition(b, i->arg) == n; });
  } else if (const auto* s = m.as<Term::SIns>()) {
    if (const auto* g = s->body.as<Term::Gen>())
      return any_of_reducts(g->body, [&](const Term& b) { return open_transition(b, Transition{s->arg}) == n; });
  } else if (m.is<Term::Prev>()) {
    if (auto inner = match_quote_chain(m)) return check(*inner, n);
  }
  return false;
}

}  // namespace

bool parallel_reduce_check(const Term& m, const Term& n) { return check(m, n); }

std::vector<Term> parallel_reducts(const Term& m, std::size_t cap) { return enumerate(m, cap); }

bool has_ill_shaped_elimination(const Term& m) {
  if (const auto* a = m.as<Term::App>()) {
    if (a->fn.is<Term::Next>() || a->fn.is<Term::Gen>()) return true;
  } else if (const auto* i = m.as<Term::TApp>()) {
    if (i->body.is<Term::Lam>() || i->body.is<Term::Next>()) return true;
  } else if (const auto* s = m.as<Term::SIns>()) {
    if (s->body.is<Term::Lam>() || s->body.is<Term::Next>()) return true;
  } else if (const auto* p = m.as<Term::Prev>()) {
    if (p->body.is<Term::Lam>() || p->body.is<Term::Gen>()) return true;
    if (const auto* n = p->body.as<Term::Next>(); n && !(n->var == p->var)) return true;
  }
  for (const auto& k : children(m))
    if (has_ill_shaped_elimination(k)) return true;
  return false;
}

namespace {

class NormalityChecker {
 public:
  explicit NormalityChecker(const std::set<std::string>& delta) {
    for (const auto& d : delta) delta_.push_back(TransitionVar::free(d));
  }

  bool normal(const Path& t, const Term& m) {
    return std::visit(
        [&](const auto& x) -> bool {
          using N = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<N, Term::Var> || std::is_same_v<N, Term::IntLit> ||
                        std::is_same_v<N, Term::BoolLit>) {
            return true;
          } else if constexpr (std::is_same_v<N, Term::Lam> || std::is_same_v<N, Term::Fix>) {
            return normal(t, x.body);
          } else if constexpr (std::is_same_v<N, Term::BinOp>) {
            return normal(t, x.lhs) && normal(t, x.rhs);
          } else if constexpr (std::is_same_v<N, Term::If>) {
            return normal(t, x.cond) && normal(t, x.then_branch) && normal(t, x.else_branch);
          } else if constexpr (std::is_same_v<N, Term::App>) {
            return normal(t, x.fn) && neutral(t, x.fn) && normal(t, x.arg);
          } else if constexpr (std::is_same_v<N, Term::Next>) {
            return normal(Path::letter(x.var, true) * t, x.body);
          } else if constexpr (std::is_same_v<N, Term::Prev>) {
            Path inner = Path::letter(x.var) * t;
            return normal(inner, x.body) && neutral(inner, x.body);
          } else if constexpr (std::is_same_v<N, Term::Gen>) {
            for (auto& d : delta_) d = shift(Transition{d}, 1)[0];
            delta_.push_back(TransitionVar::bound(0));
            bool r = normal(shift(t, 1), x.body);
            delta_.pop_back();
            for (auto& d : delta_) d = shift(Transition{d}, -1)[0];
            return r;
          } else {
            return normal(t, x.body) && neutral(t, x.body);
          }
        },
        m.node().v);
  }

 private:
  // The listed neutral forms are variables, applications and instantiations;
  // prev and the miniML forms are equally unable to take part in a redex with
  // their parent, so anything but an introduction form is neutral.
  bool neutral(const Path& t, const Term& m) const {
    if (!path_leq(Path{}, erase_delta(t))) return true;
    return !(m.is<Term::Lam>() || m.is<Term::Next>() || m.is<Term::Gen>());
  }
  Path erase_delta(Path t) const {
    for (const auto& d : delta_) t = substitute(t, d, Transition{});
    return t;
  }
  std::vector<TransitionVar> delta_;
};

}  // namespace

bool is_T_normal_direct(const std::set<std::string>& delta, const Path& t, const Term& m) {
  auto erase = [&](Path p) {
    for (const auto& d : delta) p = substitute(p, TransitionVar::free(d), Transition{});
    return p;
  };
  Path te = erase(t);
  std::vector<LocalRedex> local;
  collect(m, local);
  for (const auto& r : local)
    if (path_leq(erase(r.path), te)) return false;
  return true;
}

bool is_T_normal(const std::set<std::string>& delta, const Path& t, const Term& m) {
  if (has_ill_shaped_elimination(m)) return is_T_normal_direct(delta, t, m);
  NormalityChecker c(delta);
  return c.normal(t, m);
}

}  // namespace stagecraft
