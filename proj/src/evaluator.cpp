#include "stagecraft/evaluator.hpp"

#include "stagecraft/syntax.hpp"

namespace stagecraft {

namespace {

struct ErrSignal {};
struct FuelSignal {};

class Evaluator {
 public:
  explicit Evaluator(std::size_t fuel) : fuel_(fuel) {}

  std::size_t used() const { return used_; }

  Term eval(Term t, const Transition& a) {
    if (++depth_ > kMaxEvalDepth) throw FuelSignal{};
    Term r = a.empty() ? eval_zero(std::move(t)) : eval_staged(t, a);
    --depth_;
    return r;
  }

 private:
  void tick() {
    if (used_ >= fuel_) throw FuelSignal{};
    ++used_;
  }

  static const Integer& as_int(const Term& t) {
    const auto* i = t.as<Term::IntLit>();
    if (!i) throw ErrSignal{};
    return i->value;
  }

  Term eval_zero(Term t) {
    const Transition eps;
    while (true) {
      tick();
      if (t.is<Term::IntLit>() || t.is<Term::BoolLit>() || t.is<Term::Lam>()) return t;
      if (t.is<Term::Var>() || t.is<Term::Prev>()) throw ErrSignal{};
      if (const auto* x = t.as<Term::BinOp>()) {
        Term l = eval(x->lhs, eps);
        const Integer& li = as_int(l);
        Term r = eval(x->rhs, eps);
        const Integer& ri = as_int(r);
        switch (x->op) {
          case BinOpKind::Add: return Term::int_lit(li + ri);
          case BinOpKind::Sub: return Term::int_lit(li - ri);
          case BinOpKind::Mul: return Term::int_lit(li * ri);
          case BinOpKind::Eq: return Term::bool_lit(li == ri);
        }
      }
      if (const auto* x = t.as<Term::If>()) {
        Term c = eval(x->cond, eps);
        const auto* b = c.as<Term::BoolLit>();
        if (!b) throw ErrSignal{};
        t = b->value ? x->then_branch : x->else_branch;
        continue;
      }
      if (const auto* x = t.as<Term::Fix>()) {
        t = open_term(x->body, t);
        continue;
      }
      if (const auto* x = t.as<Term::App>()) {
        Term f = eval(x->fn, eps);
        const auto* lam = f.as<Term::Lam>();
        if (!lam) throw ErrSignal{};
        Term arg = eval(x->arg, eps);
        t = open_term(lam->body, arg);
        continue;
      }
      if (const auto* x = t.as<Term::Next>()) return Term::next(x->var, eval(x->body, Transition{x->var}));
      if (const auto* x = t.as<Term::Gen>()) return Term::gen(x->hint, eval(x->body, eps));
      if (const auto* x = t.as<Term::TApp>()) {
        t = instantiate_value(x->body, x->arg);
        continue;
      }
      if (const auto* x = t.as<Term::SIns>()) {
        t = instantiate_value(x->body, Transition{x->arg});
        continue;
      }
      throw ErrSignal{};
    }
  }

  Term instantiate_value(const Term& body, const Transition& arg) {
    Term g = eval(body, Transition{});
    const auto* gen = g.as<Term::Gen>();
    if (!gen) throw ErrSignal{};
    return open_transition(gen->body, arg);
  }

  Term eval_staged(const Term& t, const Transition& a) {
    tick();
    return std::visit(
        [&](const auto& x) -> Term {
          using N = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<N, Term::Var> || std::is_same_v<N, Term::IntLit> ||
                        std::is_same_v<N, Term::BoolLit>) {
            return t;
          } else if constexpr (std::is_same_v<N, Term::BinOp>) {
            Term l = eval(x.lhs, a);
            return Term::binop(x.op, l, eval(x.rhs, a));
          } else if constexpr (std::is_same_v<N, Term::If>) {
            Term c = eval(x.cond, a);
            Term th = eval(x.then_branch, a);
            return Term::if_(c, th, eval(x.else_branch, a));
          } else if constexpr (std::is_same_v<N, Term::Fix>) {
            return Term::fix(x.hint, x.annot, eval(x.body, a));
          } else if constexpr (std::is_same_v<N, Term::Lam>) {
            return Term::lam(x.hint, x.annot, eval(x.body, a));
          } else if constexpr (std::is_same_v<N, Term::App>) {
            Term f = eval(x.fn, a);
            return Term::app(f, eval(x.arg, a));
          } else if constexpr (std::is_same_v<N, Term::Next>) {
            return Term::next(x.var, eval(x.body, a + x.var));
          } else if constexpr (std::is_same_v<N, Term::Prev>) {
            if (!(a.last() == x.var)) throw ErrSignal{};
            Transition inner = a.drop_last();
            if (!inner.empty()) return Term::prev(x.var, eval(x.body, inner));
            Term r = eval(x.body, inner);
            const auto* q = r.as<Term::Next>();
            if (!q || !(q->var == x.var)) throw ErrSignal{};
            return q->body;
          } else if constexpr (std::is_same_v<N, Term::Gen>) {
            return Term::gen(x.hint, eval(x.body, shift(a, 1)));
          } else if constexpr (std::is_same_v<N, Term::TApp>) {
            return Term::tapp(eval(x.body, a), x.arg);
          } else {
            return Term::sins(eval(x.body, a), x.arg);
          }
        },
        t.node().v);
  }

  std::size_t fuel_;
  std::size_t used_ = 0;
  std::size_t depth_ = 0;
};

}  // namespace

EvalResult eval(const Transition& stage, const Term& m, std::size_t fuel) {
  Evaluator ev(fuel);
  try {
    Term v = ev.eval(m, stage);
    return {EvalResult::Kind::Value, v, ev.used()};
  } catch (const ErrSignal&) {
    return {EvalResult::Kind::Err, std::nullopt, ev.used()};
  } catch (const FuelSignal&) {
    return {EvalResult::Kind::FuelExhausted, std::nullopt, ev.used()};
  }
}

bool is_value(const Transition& a, const Term& t) {
  if (a.empty()) {
    if (t.is<Term::IntLit>() || t.is<Term::BoolLit>() || t.is<Term::Lam>()) return true;
    if (const auto* x = t.as<Term::Next>()) return is_value(Transition{x->var}, x->body);
    if (const auto* x = t.as<Term::Gen>()) return is_value(a, x->body);
    return false;
  }
  return std::visit(
      [&](const auto& x) -> bool {
        using N = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<N, Term::Var> || std::is_same_v<N, Term::IntLit> ||
                      std::is_same_v<N, Term::BoolLit>) {
          return true;
        } else if constexpr (std::is_same_v<N, Term::BinOp>) {
          return is_value(a, x.lhs) && is_value(a, x.rhs);
        } else if constexpr (std::is_same_v<N, Term::If>) {
          return is_value(a, x.cond) && is_value(a, x.then_branch) && is_value(a, x.else_branch);
        } else if constexpr (std::is_same_v<N, Term::Fix> || std::is_same_v<N, Term::Lam>) {
          return is_value(a, x.body);
        } else if constexpr (std::is_same_v<N, Term::App>) {
          return is_value(a, x.fn) && is_value(a, x.arg);
        } else if constexpr (std::is_same_v<N, Term::Next>) {
          return is_value(a + x.var, x.body);
        } else if constexpr (std::is_same_v<N, Term::Prev>) {
          if (!(a.last() == x.var)) return false;
          Transition inner = a.drop_last();
          return !inner.empty() && is_value(inner, x.body);
        } else if constexpr (std::is_same_v<N, Term::Gen>) {
          return is_value(shift(a, 1), x.body);
        } else {
          return is_value(a, x.body);
        }
      },
      t.node().v);
}

std::string describe(const EvalResult& r) {
  switch (r.kind) {
    case EvalResult::Kind::Value: return to_string(*r.value);
    case EvalResult::Kind::Err: return "err";
    case EvalResult::Kind::FuelExhausted: return "fuel exhausted";
  }
  return "";
}

Term desugar_run(const Term& m) { return Term::tapp(m, Transition{}); }

Term desugar_csp(const Term& m, const TransitionVar& a, const std::string& b_hint) {
  TransitionVar outer = shift(Transition{a}, 1).last();
  return Term::gen(b_hint, Term::prev(outer, Term::tapp(shift_transitions(m, 1), Transition{outer, TransitionVar::bound(0)})));
}

}  // namespace stagecraft
