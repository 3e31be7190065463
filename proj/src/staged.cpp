#include "stagecraft/staged.hpp"

#include <set>
#include <sstream>
#include <vector>

#include "stagecraft/syntax.hpp"

namespace stagecraft {

namespace {

bool has_bound_below(const Transition& t, std::uint32_t limit) {
  for (const auto& v : t)
    if (v.is_bound() && v.index() < limit) return true;
  return false;
}

// Delta with nameless entries for enclosing gens and foralls. A gen entry may
// start without a stage; the first well-formedness query that needs it fixes
// it.
class Delta {
 public:
  explicit Delta(const TransitionEnv& free) : free_(free) {}

  std::uint32_t depth() const { return static_cast<std::uint32_t>(bound_.size()); }

  void push_known(Transition stage) { bound_.push_back({std::move(stage), {}}); }
  void push_unknown(Transition gen_stage) { bound_.push_back({std::nullopt, std::move(gen_stage)}); }
  std::optional<Transition> pop() {
    auto s = bound_.back().stage;
    bound_.pop_back();
    return s;
  }

  // alpha @ prefix in Delta, both read in the current scope.
  bool declared_at(const TransitionVar& v, const Transition& prefix) {
    if (v.is_free()) {
      const Transition* d = free_.lookup(v.name());
      return d && *d == prefix;
    }
    std::uint32_t d = depth();
    if (v.index() >= d) return false;
    std::uint32_t k = d - 1 - v.index();
    std::uint32_t crossed = d - k;
    Entry& e = bound_[k];
    if (e.stage) return shift(*e.stage, crossed) == prefix;
    if (has_bound_below(prefix, crossed)) return false;
    Transition s = shift(prefix, -static_cast<std::int64_t>(crossed));
    if (!s.has_prefix(e.gen_stage)) return false;
    e.stage = s;
    return true;
  }

  bool wf_transition(const Transition& a) {
    Transition prefix;
    for (const auto& v : a) {
      if (!declared_at(v, prefix)) return false;
      prefix = prefix + v;
    }
    return true;
  }

  bool wf_env() {
    for (const auto& [_, s] : free_.entries())
      if (!wf_transition(s)) return false;
    std::uint32_t d = depth();
    for (std::uint32_t k = 0; k < d; ++k)
      if (bound_[k].stage && !wf_transition(shift(*bound_[k].stage, d - k))) return false;
    return true;
  }

  bool wf_type(const Transition& a, const Type& t) {
    if (t.is<Type::Int>() || t.is<Type::Bool>()) return wf_transition(a);
    if (const auto* x = t.as<Type::Arrow>()) return wf_type(a, x->dom) && wf_type(a, x->cod);
    if (const auto* x = t.as<Type::Code>()) return wf_type(a + x->var, x->body);
    if (const auto* x = t.as<Type::Forall>()) {
      push_known(a + (x->stage ? *x->stage : Transition{}));
      bool ok = wf_type(shift(a, 1), x->body);
      pop();
      return ok;
    }
    return false;
  }

 private:
  struct Entry {
    std::optional<Transition> stage;
    Transition gen_stage;
  };
  const TransitionEnv& free_;
  std::vector<Entry> bound_;
};

class StagedChecker {
 public:
  StagedChecker(const TypingContext& g, const TransitionEnv& d) : g_(g), delta_(d) {
    for (const auto& [x, b] : g.entries()) ctx_.bind(x, with_default_stages(b.type), b.stage);
  }

  Type check(const Term& t, const Transition& a) {
    return std::visit([&](const auto& x) { return rule(x, a); }, t.node().v);
  }

 private:
  struct Local {
    Type type;
    Transition stage;
    std::uint32_t depth;
  };

  [[noreturn]] void fail(TypeErrorKind k, const std::string& detail) { throw TypeError(k, pos_, detail); }

  Type child(const Term& t, const Transition& a, std::uint32_t idx) {
    pos_.push_back(idx);
    Type r = check(t, a);
    pos_.pop_back();
    return r;
  }

  void require_wf_context() {
    if (!delta_.wf_env()) fail(TypeErrorKind::WfFailure, "ill-formed transition environment");
    std::uint32_t d = delta_.depth();
    for (const auto& [x, b] : ctx_.entries())
      if (!delta_.wf_type(shift(b.stage, d), shift(b.type, d)))
        fail(TypeErrorKind::WfFailure, x + " : " + to_string(b.type) + " is ill-formed at " + to_string(b.stage));
    for (const auto& l : locals_) {
      std::uint32_t crossed = d - l.depth;
      if (!delta_.wf_type(shift(l.stage, crossed), shift(l.type, crossed)))
        fail(TypeErrorKind::WfFailure, "binder of type " + to_string(l.type) + " is ill-formed");
    }
  }

  void require_wf_stage(const Transition& a) {
    if (!delta_.wf_transition(a)) fail(TypeErrorKind::WfFailure, "stage " + to_string(a) + " is ill-formed");
  }

  Type var_result(const Type& ty, const Transition& declared, std::uint32_t crossed, const Transition& a,
                  const std::string& name) {
    if (!(declared == a)) {
      if (has_bound_below(a, crossed))
        fail(TypeErrorKind::GenEscape, name + " is used under a transition abstraction it was declared outside of");
      fail(TypeErrorKind::VarStageMismatch,
           name + " declared at " + to_string(declared) + ", used at " + to_string(a));
    }
    require_wf_context();
    return ty;
  }

  Type rule(const Term::Var& x, const Transition& a) {
    std::uint32_t d = delta_.depth();
    if (x.ref.is_free()) {
      const Binding* b = ctx_.lookup(x.ref.name());
      if (!b) fail(TypeErrorKind::UnboundVariable, x.ref.name());
      return var_result(shift(b->type, d), shift(b->stage, d), d, a, x.ref.name());
    }
    if (x.ref.index() >= locals_.size()) fail(TypeErrorKind::UnboundVariable, "dangling index");
    const Local& l = locals_[locals_.size() - 1 - x.ref.index()];
    std::uint32_t crossed = d - l.depth;
    return var_result(shift(l.type, crossed), shift(l.stage, crossed), crossed, a, "bound variable");
  }
  Type rule(const Term::IntLit&, const Transition& a) {
    require_wf_context();
    require_wf_stage(a);
    return Type::integer();
  }
  Type rule(const Term::BoolLit&, const Transition& a) {
    require_wf_context();
    require_wf_stage(a);
    return Type::boolean();
  }
  Type rule(const Term::BinOp& x, const Transition& a) {
    Type l = child(x.lhs, a, 0);
    if (!l.is<Type::Int>()) fail(TypeErrorKind::ArithNotInt, "left operand has type " + to_string(l));
    Type r = child(x.rhs, a, 1);
    if (!r.is<Type::Int>()) fail(TypeErrorKind::ArithNotInt, "right operand has type " + to_string(r));
    return x.op == BinOpKind::Eq ? Type::boolean() : Type::integer();
  }
  Type rule(const Term::If& x, const Transition& a) {
    Type c = child(x.cond, a, 0);
    if (!c.is<Type::Bool>()) fail(TypeErrorKind::ConditionNotBool, "condition has type " + to_string(c));
    Type t = child(x.then_branch, a, 1);
    Type e = child(x.else_branch, a, 2);
    if (!(t == e)) fail(TypeErrorKind::BranchMismatch, to_string(t) + " vs " + to_string(e));
    return t;
  }
  Type rule(const Term::Fix& x, const Transition& a) {
    Type annot = with_default_stages(x.annot);
    if (!annot.is<Type::Arrow>()) fail(TypeErrorKind::FixAnnotationNotArrow, to_string(annot));
    locals_.push_back({annot, a, delta_.depth()});
    Type body = child(x.body, a, 0);
    locals_.pop_back();
    if (!(body == annot))
      fail(TypeErrorKind::FixBodyMismatch, "body has type " + to_string(body) + ", expected " + to_string(annot));
    return annot;
  }
  Type rule(const Term::Lam& x, const Transition& a) {
    Type annot = with_default_stages(x.annot);
    locals_.push_back({annot, a, delta_.depth()});
    Type body = child(x.body, a, 0);
    locals_.pop_back();
    return Type::arrow(annot, body);
  }
  Type rule(const Term::App& x, const Transition& a) {
    Type f = child(x.fn, a, 0);
    const auto* arr = f.as<Type::Arrow>();
    if (!arr) fail(TypeErrorKind::NotAFunction, "head has type " + to_string(f));
    Type arg = child(x.arg, a, 1);
    if (!(arg == arr->dom))
      fail(TypeErrorKind::ArgumentMismatch, "expected " + to_string(arr->dom) + ", got " + to_string(arg));
    return arr->cod;
  }
  Type rule(const Term::Next& x, const Transition& a) { return Type::code(x.var, child(x.body, a + x.var, 0)); }
  Type rule(const Term::Prev& x, const Transition& a) {
    if (a.empty() || !(a.last() == x.var))
      fail(TypeErrorKind::PrevStageMismatch, "stage " + to_string(a) + " does not end with the quoted variable");
    Type t = child(x.body, a.drop_last(), 0);
    const auto* c = t.as<Type::Code>();
    if (!c || !(c->var == x.var)) fail(TypeErrorKind::NotCode, "operand has type " + to_string(t));
    return c->body;
  }
  Type rule(const Term::Gen& x, const Transition& a) {
    delta_.push_unknown(a);
    Type body = child(x.body, shift(a, 1), 0);
    auto decl = delta_.pop();
    Transition b = decl ? decl->strip_prefix(a) : Transition{};
    return Type::forall_at(x.hint, b, body);
  }
  Type rule(const Term::TApp& x, const Transition& a) {
    Type t = child(x.body, a, 0);
    const auto* f = t.as<Type::Forall>();
    if (!f) fail(TypeErrorKind::NotForall, "operand has type " + to_string(t));
    const auto* c = f->body.as<Type::Code>();
    if ((f->stage && !f->stage->empty()) || !c || !(c->var == TransitionVar::bound(0)))
      fail(TypeErrorKind::Ins1ShapeMismatch, "sequence instantiation needs forall a @ []. <a>T, got " + to_string(t));
    require_wf_stage(a + x.arg);
    return instantiate(f->body, x.arg);
  }
  Type rule(const Term::SIns& x, const Transition& a) {
    Type t = child(x.body, a, 0);
    const auto* f = t.as<Type::Forall>();
    if (!f) fail(TypeErrorKind::NotForall, "operand has type " + to_string(t));
    Transition at = a + (f->stage ? *f->stage : Transition{});
    if (!delta_.declared_at(x.arg, at))
      fail(TypeErrorKind::Ins2UndeclaredStage, "instantiating variable is not declared at " + to_string(at));
    return instantiate(f->body, Transition{x.arg});
  }

  const TypingContext& g_;
  TypingContext ctx_;
  Delta delta_;
  std::vector<Local> locals_;
  Position pos_;
};

// erased terms

struct ErasedEq {
  bool operator()(const Erased& a, const Erased& b) const {
    if (a.node().index() != b.node().index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
          using N = std::decay_t<decltype(x)>;
          const N& y = *b.as<N>();
          if constexpr (std::is_same_v<N, Erased::Var>) return x.ref == y.ref;
          else if constexpr (std::is_same_v<N, Erased::IntLit> || std::is_same_v<N, Erased::BoolLit>)
            return x.value == y.value;
          else if constexpr (std::is_same_v<N, Erased::BinOp>)
            return x.op == y.op && (*this)(x.lhs, y.lhs) && (*this)(x.rhs, y.rhs);
          else if constexpr (std::is_same_v<N, Erased::If>)
            return (*this)(x.cond, y.cond) && (*this)(x.then_branch, y.then_branch) &&
                   (*this)(x.else_branch, y.else_branch);
          else if constexpr (std::is_same_v<N, Erased::App>)
            return (*this)(x.fn, y.fn) && (*this)(x.arg, y.arg);
          else if constexpr (std::is_same_v<N, Erased::NatApp>)
            return x.n == y.n && (*this)(x.body, y.body);
          else
            return (*this)(x.body, y.body);
        },
        a.node());
  }
};

Erased map_vars(const Erased& t, const std::function<Erased(const VarRef&, std::uint32_t)>& f, std::uint32_t d) {
  return std::visit(
      [&](const auto& x) -> Erased {
        using N = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<N, Erased::Var>) return f(x.ref, d);
        else if constexpr (std::is_same_v<N, Erased::IntLit> || std::is_same_v<N, Erased::BoolLit>) return t;
        else if constexpr (std::is_same_v<N, Erased::BinOp>)
          return Erased(Erased::BinOp{x.op, map_vars(x.lhs, f, d), map_vars(x.rhs, f, d)});
        else if constexpr (std::is_same_v<N, Erased::If>)
          return Erased(Erased::If{map_vars(x.cond, f, d), map_vars(x.then_branch, f, d), map_vars(x.else_branch, f, d)});
        else if constexpr (std::is_same_v<N, Erased::Fix>) return Erased(Erased::Fix{x.hint, map_vars(x.body, f, d + 1)});
        else if constexpr (std::is_same_v<N, Erased::Lam>) return Erased(Erased::Lam{x.hint, map_vars(x.body, f, d + 1)});
        else if constexpr (std::is_same_v<N, Erased::App>)
          return Erased(Erased::App{map_vars(x.fn, f, d), map_vars(x.arg, f, d)});
        else if constexpr (std::is_same_v<N, Erased::NatApp>) return Erased(Erased::NatApp{map_vars(x.body, f, d), x.n});
        else return Erased(N{map_vars(x.body, f, d)});
      },
      t.node());
}

Erased shift_vars(const Erased& t, std::uint32_t by) {
  if (by == 0) return t;
  return map_vars(
      t,
      [&](const VarRef& v, std::uint32_t d) {
        if (v.is_bound() && v.index() >= d) return Erased(Erased::Var{VarRef::bound(v.index() + by)});
        return Erased(Erased::Var{v});
      },
      0);
}

}  // namespace

bool wf_transition(const TransitionEnv& d, const Transition& a) { return Delta(d).wf_transition(a); }
bool wf_env(const TransitionEnv& d) { return Delta(d).wf_env(); }
bool wf_type(const TransitionEnv& d, const Transition& a, const Type& t) { return Delta(d).wf_type(a, t); }
bool wf_context(const TransitionEnv& d, const TypingContext& g) {
  Delta delta(d);
  if (!delta.wf_env()) return false;
  for (const auto& [_, b] : g.entries())
    if (!delta.wf_type(b.stage, with_default_stages(b.type))) return false;
  return true;
}

Type with_default_stages(const Type& t) {
  if (const auto* x = t.as<Type::Arrow>()) return Type::arrow(with_default_stages(x->dom), with_default_stages(x->cod));
  if (const auto* x = t.as<Type::Code>()) return Type::code(x->var, with_default_stages(x->body));
  if (const auto* x = t.as<Type::Forall>())
    return Type::forall_at(x->hint, x->stage ? *x->stage : Transition{}, with_default_stages(x->body));
  return t;
}

Type staged_typecheck(const TypingContext& g, const TransitionEnv& d, const Transition& stage, const Term& m) {
  StagedChecker c(g, d);
  return c.check(m, stage);
}

std::optional<Type> try_staged_typecheck(const TypingContext& g, const TransitionEnv& d, const Transition& stage,
                                         const Term& m) {
  try {
    return staged_typecheck(g, d, stage, m);
  } catch (const TypeError&) {
    return std::nullopt;
  }
}

bool operator==(const Erased& a, const Erased& b) { return ErasedEq{}(a, b); }

Erased erase(const Term& m) {
  return std::visit(
      [&](const auto& x) -> Erased {
        using N = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<N, Term::Var>) return Erased(Erased::Var{x.ref});
        else if constexpr (std::is_same_v<N, Term::IntLit>) return Erased(Erased::IntLit{x.value});
        else if constexpr (std::is_same_v<N, Term::BoolLit>) return Erased(Erased::BoolLit{x.value});
        else if constexpr (std::is_same_v<N, Term::BinOp>) return Erased(Erased::BinOp{x.op, erase(x.lhs), erase(x.rhs)});
        else if constexpr (std::is_same_v<N, Term::If>)
          return Erased(Erased::If{erase(x.cond), erase(x.then_branch), erase(x.else_branch)});
        else if constexpr (std::is_same_v<N, Term::Fix>) return Erased(Erased::Fix{x.hint, erase(x.body)});
        else if constexpr (std::is_same_v<N, Term::Lam>) return Erased(Erased::Lam{x.hint, erase(x.body)});
        else if constexpr (std::is_same_v<N, Term::App>) return Erased(Erased::App{erase(x.fn), erase(x.arg)});
        else if constexpr (std::is_same_v<N, Term::Next>) return Erased(Erased::Next{erase(x.body)});
        else if constexpr (std::is_same_v<N, Term::Prev>) return Erased(Erased::Prev{erase(x.body)});
        else if constexpr (std::is_same_v<N, Term::Gen>) return Erased(Erased::Gen{erase(x.body)});
        else if constexpr (std::is_same_v<N, Term::TApp>) return Erased(Erased::NatApp{erase(x.body), x.arg.size()});
        else return Erased(Erased::UnitApp{erase(x.body)});
      },
      m.node().v);
}

Erased open_term(const Erased& body, const Erased& n) {
  return map_vars(
      body,
      [&](const VarRef& v, std::uint32_t d) {
        if (v.is_bound()) {
          if (v.index() == d) return shift_vars(n, d);
          if (v.index() > d) return Erased(Erased::Var{VarRef::bound(v.index() - 1)});
        }
        return Erased(Erased::Var{v});
      },
      0);
}

namespace {

void free_names(const Erased& t, std::set<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using N = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<N, Erased::Var>) {
          if (x.ref.is_free()) out.insert(x.ref.name());
        } else if constexpr (std::is_same_v<N, Erased::BinOp>) {
          free_names(x.lhs, out);
          free_names(x.rhs, out);
        } else if constexpr (std::is_same_v<N, Erased::If>) {
          free_names(x.cond, out);
          free_names(x.then_branch, out);
          free_names(x.else_branch, out);
        } else if constexpr (std::is_same_v<N, Erased::App>) {
          free_names(x.fn, out);
          free_names(x.arg, out);
        } else if constexpr (!std::is_same_v<N, Erased::IntLit> && !std::is_same_v<N, Erased::BoolLit>) {
          free_names(x.body, out);
        }
      },
      t.node());
}

class ErasedPrinter {
 public:
  explicit ErasedPrinter(const Erased& root) { free_names(root, free_); }

  // precedence: 0 binders, 1 eq, 2 add, 3 mul, 4 next/prev, 5 application, 6 atoms
  void print(const Erased& t, int ctx) {
    std::visit([&](const auto& x) { node(x, ctx); }, t.node());
  }
  std::string str() const { return os_.str(); }

 private:
  void open(int prec, int ctx) {
    if (prec < ctx) os_ << "(";
  }
  void close(int prec, int ctx) {
    if (prec < ctx) os_ << ")";
  }
  void node(const Erased::Var& x, int) {
    if (x.ref.is_free()) os_ << x.ref.name();
    else if (x.ref.index() < scope_.size()) os_ << scope_[scope_.size() - 1 - x.ref.index()];
    else os_ << "#" << x.ref.index();
  }
  void node(const Erased::IntLit& x, int ctx) {
    bool neg = x.value < 0;
    if (neg && ctx > 0) os_ << "(";
    os_ << x.value;
    if (neg && ctx > 0) os_ << ")";
  }
  void node(const Erased::BoolLit& x, int) { os_ << (x.value ? "true" : "false"); }
  void node(const Erased::BinOp& x, int ctx) {
    int p = x.op == BinOpKind::Eq ? 1 : (x.op == BinOpKind::Mul ? 3 : 2);
    const char* sym = x.op == BinOpKind::Eq ? " = " : x.op == BinOpKind::Add ? " + " : x.op == BinOpKind::Sub ? " - " : " * ";
    open(p, ctx);
    print(x.lhs, p == 1 ? 2 : p);
    os_ << sym;
    print(x.rhs, p + 1);
    close(p, ctx);
  }
  void node(const Erased::If& x, int ctx) {
    open(0, ctx);
    os_ << "if ";
    print(x.cond, 0);
    os_ << " then ";
    print(x.then_branch, 0);
    os_ << " else ";
    print(x.else_branch, 0);
    close(0, ctx);
  }
  void binder(const char* kw, const std::string& hint, const Erased& body, int ctx) {
    open(0, ctx);
    std::string n = fresh_name(hint.empty() ? "x" : hint, scope_, free_);
    os_ << kw << n << ". ";
    scope_.push_back(n);
    print(body, 0);
    scope_.pop_back();
    close(0, ctx);
  }
  void node(const Erased::Fix& x, int ctx) { binder("fix ", x.hint, x.body, ctx); }
  void node(const Erased::Lam& x, int ctx) { binder("\\", x.hint, x.body, ctx); }
  void node(const Erased::App& x, int ctx) {
    open(5, ctx);
    print(x.fn, 5);
    os_ << " ";
    print(x.arg, 6);
    close(5, ctx);
  }
  void node(const Erased::Next& x, int ctx) {
    open(4, ctx);
    os_ << "next ";
    print(x.body, 6);
    close(4, ctx);
  }
  void node(const Erased::Prev& x, int ctx) {
    open(4, ctx);
    os_ << "prev ";
    print(x.body, 6);
    close(4, ctx);
  }
  void node(const Erased::Gen& x, int ctx) {
    open(0, ctx);
    os_ << "gen. ";
    print(x.body, 0);
    close(0, ctx);
  }
  void node(const Erased::UnitApp& x, int ctx) {
    open(5, ctx);
    print(x.body, 5);
    os_ << " @![]";
    close(5, ctx);
  }
  void node(const Erased::NatApp& x, int ctx) {
    open(5, ctx);
    print(x.body, 5);
    os_ << " @" << x.n;
    close(5, ctx);
  }

  std::ostringstream os_;
  std::vector<std::string> scope_;
  std::set<std::string> free_;
};

struct ErrSignal {};
struct FuelSignal {};

class ErasedEvaluator {
 public:
  explicit ErasedEvaluator(std::size_t fuel) : fuel_(fuel) {}
  std::size_t used() const { return used_; }

  Erased eval(Erased t, std::size_t n) {
    if (++depth_ > kMaxEvalDepth) throw FuelSignal{};
    Erased r = n == 0 ? eval_zero(std::move(t)) : eval_staged(t, n);
    --depth_;
    return r;
  }

 private:
  void tick() {
    if (used_ >= fuel_) throw FuelSignal{};
    ++used_;
  }

  static const Integer& as_int(const Erased& t) {
    const auto* i = t.as<Erased::IntLit>();
    if (!i) throw ErrSignal{};
    return i->value;
  }

  Erased eval_zero(Erased t) {
    while (true) {
      tick();
      if (t.is<Erased::IntLit>() || t.is<Erased::BoolLit>() || t.is<Erased::Lam>()) return t;
      if (t.is<Erased::Var>() || t.is<Erased::Prev>()) throw ErrSignal{};
      if (const auto* x = t.as<Erased::BinOp>()) {
        Erased l = eval(x->lhs, 0);
        const Integer& li = as_int(l);
        Erased r = eval(x->rhs, 0);
        const Integer& ri = as_int(r);
        switch (x->op) {
          case BinOpKind::Add: return Erased(Erased::IntLit{li + ri});
          case BinOpKind::Sub: return Erased(Erased::IntLit{li - ri});
          case BinOpKind::Mul: return Erased(Erased::IntLit{li * ri});
          case BinOpKind::Eq: return Erased(Erased::BoolLit{li == ri});
        }
      }
      if (const auto* x = t.as<Erased::If>()) {
        Erased c = eval(x->cond, 0);
        const auto* b = c.as<Erased::BoolLit>();
        if (!b) throw ErrSignal{};
        t = b->value ? x->then_branch : x->else_branch;
        continue;
      }
      if (const auto* x = t.as<Erased::Fix>()) {
        t = open_term(x->body, t);
        continue;
      }
      if (const auto* x = t.as<Erased::App>()) {
        Erased f = eval(x->fn, 0);
        const auto* lam = f.as<Erased::Lam>();
        if (!lam) throw ErrSignal{};
        Erased arg = eval(x->arg, 0);
        t = open_term(lam->body, arg);
        continue;
      }
      if (const auto* x = t.as<Erased::Next>()) return Erased(Erased::Next{eval(x->body, 1)});
      if (const auto* x = t.as<Erased::Gen>()) return Erased(Erased::Gen{eval(x->body, 0)});
      if (const auto* x = t.as<Erased::NatApp>()) {
        Erased g = eval(x->body, 0);
        const auto* gen = g.as<Erased::Gen>();
        if (!gen) throw ErrSignal{};
        const auto* q = gen->body.as<Erased::Next>();
        if (!q) throw ErrSignal{};
        Erased body = q->body;
        for (std::size_t i = 0; i < x->n; ++i) body = Erased(Erased::Next{body});
        t = body;
        continue;
      }
      if (const auto* x = t.as<Erased::UnitApp>()) {
        // The value under the abstraction is evaluated once more, matching
        // the instantiated body being evaluated on the annotated side.
        Erased g = eval(x->body, 0);
        const auto* gen = g.as<Erased::Gen>();
        if (!gen) throw ErrSignal{};
        t = gen->body;
        continue;
      }
      throw ErrSignal{};
    }
  }

  Erased eval_staged(const Erased& t, std::size_t n) {
    tick();
    return std::visit(
        [&](const auto& x) -> Erased {
          using N = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<N, Erased::Var> || std::is_same_v<N, Erased::IntLit> ||
                        std::is_same_v<N, Erased::BoolLit>) {
            return t;
          } else if constexpr (std::is_same_v<N, Erased::BinOp>) {
            Erased l = eval(x.lhs, n);
            return Erased(Erased::BinOp{x.op, l, eval(x.rhs, n)});
          } else if constexpr (std::is_same_v<N, Erased::If>) {
            Erased c = eval(x.cond, n);
            Erased th = eval(x.then_branch, n);
            return Erased(Erased::If{c, th, eval(x.else_branch, n)});
          } else if constexpr (std::is_same_v<N, Erased::Fix>) {
            return Erased(Erased::Fix{x.hint, eval(x.body, n)});
          } else if constexpr (std::is_same_v<N, Erased::Lam>) {
            return Erased(Erased::Lam{x.hint, eval(x.body, n)});
          } else if constexpr (std::is_same_v<N, Erased::App>) {
            Erased f = eval(x.fn, n);
            return Erased(Erased::App{f, eval(x.arg, n)});
          } else if constexpr (std::is_same_v<N, Erased::Next>) {
            return Erased(Erased::Next{eval(x.body, n + 1)});
          } else if constexpr (std::is_same_v<N, Erased::Prev>) {
            if (n > 1) return Erased(Erased::Prev{eval(x.body, n - 1)});
            Erased r = eval(x.body, 0);
            const auto* q = r.as<Erased::Next>();
            if (!q) throw ErrSignal{};
            return q->body;
          } else if constexpr (std::is_same_v<N, Erased::Gen>) {
            return Erased(Erased::Gen{eval(x.body, n)});
          } else if constexpr (std::is_same_v<N, Erased::UnitApp>) {
            return Erased(Erased::UnitApp{eval(x.body, n)});
          } else {
            return Erased(Erased::NatApp{eval(x.body, n), x.n});
          }
        },
        t.node());
  }

  std::size_t fuel_;
  std::size_t used_ = 0;
  std::size_t depth_ = 0;
};

}  // namespace

std::string to_string(const Erased& m) {
  ErasedPrinter p(m);
  p.print(m, 0);
  return p.str();
}

ErasedResult erased_eval(std::size_t stage, const Erased& m, std::size_t fuel) {
  ErasedEvaluator ev(fuel);
  try {
    Erased v = ev.eval(m, stage);
    return {EvalResult::Kind::Value, v, ev.used()};
  } catch (const ErrSignal&) {
    return {EvalResult::Kind::Err, std::nullopt, ev.used()};
  } catch (const FuelSignal&) {
    return {EvalResult::Kind::FuelExhausted, std::nullopt, ev.used()};
  }
}

std::string describe(const ErasedResult& r) {
  switch (r.kind) {
    case EvalResult::Kind::Value: return to_string(*r.value);
    case EvalResult::Kind::Err: return "err";
    case EvalResult::Kind::FuelExhausted: return "fuel exhausted";
  }
  return "";
}

}  // namespace stagecraft
