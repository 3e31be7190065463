#include "stagecraft/typing.hpp"

#include <sstream>

#include "stagecraft/syntax.hpp"

namespace stagecraft {

const char* to_string(TypeErrorKind k) {
  switch (k) {
    case TypeErrorKind::VarStageMismatch: return "VarStageMismatch";
    case TypeErrorKind::UnboundVariable: return "UnboundVariable";
    case TypeErrorKind::NotAFunction: return "NotAFunction";
    case TypeErrorKind::ArgumentMismatch: return "ArgumentMismatch";
    case TypeErrorKind::NotCode: return "NotCode";
    case TypeErrorKind::NotForall: return "NotForall";
    case TypeErrorKind::GenEscape: return "GenEscape";
    case TypeErrorKind::ConditionNotBool: return "ConditionNotBool";
    case TypeErrorKind::BranchMismatch: return "BranchMismatch";
    case TypeErrorKind::ArithNotInt: return "ArithNotInt";
    case TypeErrorKind::FixAnnotationNotArrow: return "FixAnnotationNotArrow";
    case TypeErrorKind::FixBodyMismatch: return "FixBodyMismatch";
    case TypeErrorKind::PrevStageMismatch: return "PrevStageMismatch";
    case TypeErrorKind::WfFailure: return "WfFailure";
    case TypeErrorKind::Ins1ShapeMismatch: return "Ins1ShapeMismatch";
    case TypeErrorKind::Ins2UndeclaredStage: return "Ins2UndeclaredStage";
  }
  return "?";
}

std::string to_string(const Position& p) {
  if (p.empty()) return "root";
  std::ostringstream os;
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "." : "") << p[i];
  return os.str();
}

TypeError::TypeError(TypeErrorKind kind, Position position, const std::string& detail)
    : std::runtime_error(std::string(stagecraft::to_string(kind)) + " at " + stagecraft::to_string(position) +
                         (detail.empty() ? "" : ": " + detail)),
      kind(kind),
      position(std::move(position)),
      detail(detail) {}

namespace {

bool has_bound_below(const Transition& t, std::uint32_t limit) {
  for (const auto& v : t)
    if (v.is_bound() && v.index() < limit) return true;
  return false;
}

class Checker {
 public:
  explicit Checker(const TypingContext& g) : g_(g) {}

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

  Type var_result(const Type& ty, const Transition& declared, std::uint32_t crossed, const Transition& a,
                  const std::string& name) {
    if (declared == a) return ty;
    if (has_bound_below(a, crossed))
      fail(TypeErrorKind::GenEscape, name + " is used under a transition abstraction it was declared outside of");
    fail(TypeErrorKind::VarStageMismatch, name + " declared at " + to_string(declared) + ", used at " + to_string(a));
  }

  Type rule(const Term::Var& x, const Transition& a) {
    if (x.ref.is_free()) {
      const Binding* b = g_.lookup(x.ref.name());
      if (!b) fail(TypeErrorKind::UnboundVariable, x.ref.name());
      return var_result(shift(b->type, depth_), shift(b->stage, depth_), depth_, a, x.ref.name());
    }
    if (x.ref.index() >= locals_.size()) fail(TypeErrorKind::UnboundVariable, "dangling index");
    const Local& l = locals_[locals_.size() - 1 - x.ref.index()];
    std::uint32_t crossed = depth_ - l.depth;
    return var_result(shift(l.type, crossed), shift(l.stage, crossed), crossed, a, "bound variable");
  }
  Type rule(const Term::IntLit&, const Transition&) { return Type::integer(); }
  Type rule(const Term::BoolLit&, const Transition&) { return Type::boolean(); }
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
    if (!x.annot.is<Type::Arrow>()) fail(TypeErrorKind::FixAnnotationNotArrow, to_string(x.annot));
    locals_.push_back({x.annot, a, depth_});
    Type body = child(x.body, a, 0);
    locals_.pop_back();
    if (!(body == x.annot))
      fail(TypeErrorKind::FixBodyMismatch, "body has type " + to_string(body) + ", expected " + to_string(x.annot));
    return x.annot;
  }
  Type rule(const Term::Lam& x, const Transition& a) {
    locals_.push_back({x.annot, a, depth_});
    Type body = child(x.body, a, 0);
    locals_.pop_back();
    return Type::arrow(x.annot, body);
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
    ++depth_;
    Type body = child(x.body, shift(a, 1), 0);
    --depth_;
    return Type::forall(x.hint, body);
  }
  Type instantiate_at(const Term& body, const Transition& arg, const Transition& a) {
    Type t = child(body, a, 0);
    const auto* f = t.as<Type::Forall>();
    if (!f) fail(TypeErrorKind::NotForall, "operand has type " + to_string(t));
    return instantiate(f->body, arg);
  }
  Type rule(const Term::TApp& x, const Transition& a) { return instantiate_at(x.body, x.arg, a); }
  Type rule(const Term::SIns& x, const Transition& a) { return instantiate_at(x.body, Transition{x.arg}, a); }

  const TypingContext& g_;
  std::vector<Local> locals_;
  std::uint32_t depth_ = 0;
  Position pos_;
};

}  // namespace

Type typecheck(const TypingContext& g, const Transition& stage, const Term& m) {
  Checker c(g);
  return c.check(m, stage);
}

std::optional<Type> try_typecheck(const TypingContext& g, const Transition& stage, const Term& m) {
  try {
    return typecheck(g, stage, m);
  } catch (const TypeError&) {
    return std::nullopt;
  }
}

}  // namespace stagecraft
