#include "stagecraft/embeddings.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "stagecraft/lexer.hpp"
#include "stagecraft/syntax.hpp"

namespace stagecraft {

using K = SourceTerm::Kind;
using TK = SourceType::Kind;

const char* to_string(EmbedErrorKind k) {
  switch (k) {
    case EmbedErrorKind::NotQuantifierFree: return "NotQuantifierFree";
    case EmbedErrorKind::StackTooShallow: return "StackTooShallow";
    case EmbedErrorKind::CSPPresent: return "CSPPresent";
    case EmbedErrorKind::MissingAnnotation: return "MissingAnnotation";
  }
  return "?";
}

EmbedError::EmbedError(EmbedErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind(kind) {}

namespace {

[[noreturn]] void type_error(const std::string& msg) { throw SourceTypeError(msg); }

const SourceType& expect_arrow(const SourceType& t, const std::string& what) {
  if (t.kind != TK::Arrow) type_error(what + " has type " + to_string(t) + ", expected a function");
  return t;
}

void expect_same(const SourceType& got, const SourceType& want, const std::string& what) {
  if (!(got == want)) type_error(what + " has type " + to_string(got) + ", expected " + to_string(want));
}

Term lam_term(const std::string& x, Type annot, const Term& body) { return Term::lam(x, std::move(annot), abstract_term(body, x)); }

std::set<std::string> free_vars(const SourceTerm& m) {
  if (m.kind == K::Var) return {m.name};
  std::set<std::string> out;
  for (const auto& a : m.args)
    for (const auto& v : free_vars(a)) out.insert(v);
  if (m.kind == K::Lam) out.erase(m.name);
  return out;
}

}  // namespace

SourceTerm substitute(const SourceTerm& m, const std::string& x, const SourceTerm& n) {
  if (m.kind == K::Var) return m.name == x ? n : m;
  if (m.kind == K::Lam) {
    if (m.name == x) return m;
    auto fv_n = free_vars(n);
    if (fv_n.count(m.name) && free_vars(m.args[0]).count(x)) {
      std::set<std::string> taken = fv_n;
      for (const auto& v : free_vars(m.args[0])) taken.insert(v);
      taken.insert(x);
      std::string y = m.name;
      while (taken.count(y)) y += "'";
      SourceTerm renamed = substitute(m.args[0], m.name, SourceTerm::var(y));
      return SourceTerm::lam(y, m.annot, substitute(renamed, x, n));
    }
  }
  SourceTerm out = m;
  for (auto& a : out.args) a = substitute(a, x, n);
  return out;
}

namespace {

// One-step reducts of every child, plugged back into m.
template <class F>
void congruence(const SourceTerm& m, const F& reducts, std::vector<SourceTerm>& out) {
  for (std::size_t i = 0; i < m.args.size(); ++i)
    for (auto& r : reducts(m.args[i])) {
      SourceTerm copy = m;
      copy.args[i] = std::move(r);
      out.push_back(std::move(copy));
    }
}

bool is_beta_redex(const SourceTerm& m) { return m.kind == K::App && m.args[0].kind == K::Lam; }

SourceTerm contract_beta(const SourceTerm& m) {
  const SourceTerm& lam = m.args[0];
  return substitute(lam.args[0], lam.name, m.args[1]);
}

}  // namespace

// ---------------------------------------------------------------- circle

SourceType circle_typecheck(const CircleContext& g, std::size_t level, const SourceTerm& m) {
  switch (m.kind) {
    case K::Var:
      for (auto it = g.rbegin(); it != g.rend(); ++it)
        if (it->name == m.name) {
          if (it->level != level)
            type_error(m.name + " is declared at level " + std::to_string(it->level) + ", used at " + std::to_string(level));
          return it->type;
        }
      type_error("unbound variable " + m.name);
    case K::IntLit: return SourceType::integer();
    case K::Lam: {
      if (!m.annot) type_error("lambda without a domain type");
      CircleContext inner = g;
      inner.push_back({m.name, *m.annot, level});
      return SourceType::arrow(*m.annot, circle_typecheck(inner, level, m.args[0]));
    }
    case K::App: {
      SourceType f = expect_arrow(circle_typecheck(g, level, m.args[0]), "function");
      expect_same(circle_typecheck(g, level, m.args[1]), f.args[0], "argument");
      return f.args[1];
    }
    case K::Next: return SourceType::circle(circle_typecheck(g, level + 1, m.args[0]));
    case K::Prev: {
      if (level == 0) type_error("prev at level 0");
      SourceType t = circle_typecheck(g, level - 1, m.args[0]);
      if (t.kind != TK::Circle) type_error("prev of non-code type " + to_string(t));
      return t.args[0];
    }
    default: type_error("construct not in the linear-time calculus: " + to_string(m));
  }
}

Type embed_circle(const SourceType& t, const TransitionVar& a) {
  switch (t.kind) {
    case TK::Base: return Type::base(t.name);
    case TK::Int: return Type::integer();
    case TK::Arrow: return Type::arrow(embed_circle(t.args[0], a), embed_circle(t.args[1], a));
    case TK::Circle: return Type::code(a, embed_circle(t.args[0], a));
    default: type_error("type not in the linear-time calculus: " + to_string(t));
  }
}

Term embed_circle(const SourceTerm& m, const TransitionVar& a) {
  switch (m.kind) {
    case K::Var: return Term::free_var(m.name);
    case K::IntLit: return Term::int_lit(m.number);
    case K::Lam:
      if (!m.annot) throw EmbedError(EmbedErrorKind::MissingAnnotation, "lambda " + m.name);
      return lam_term(m.name, embed_circle(*m.annot, a), embed_circle(m.args[0], a));
    case K::App: return Term::app(embed_circle(m.args[0], a), embed_circle(m.args[1], a));
    case K::Next: return Term::next(a, embed_circle(m.args[0], a));
    case K::Prev: return Term::prev(a, embed_circle(m.args[0], a));
    default: type_error("construct not in the linear-time calculus: " + to_string(m));
  }
}

TypingContext embed_circle(const CircleContext& g, const TransitionVar& a) {
  TypingContext out;
  for (const auto& b : g) out.bind(b.name, embed_circle(b.type, a), Transition(std::vector<TransitionVar>(b.level, a)));
  return out;
}

SourceType forget_to_circle(const Type& t) {
  if (const auto* b = t.as<Type::Base>()) return SourceType::base(b->name);
  if (t.is<Type::Int>()) return SourceType::integer();
  if (const auto* a = t.as<Type::Arrow>()) return SourceType::arrow(forget_to_circle(a->dom), forget_to_circle(a->cod));
  if (const auto* c = t.as<Type::Code>()) return SourceType::circle(forget_to_circle(c->body));
  if (t.is<Type::Forall>()) throw EmbedError(EmbedErrorKind::NotQuantifierFree, "type " + to_string(t));
  throw EmbedError(EmbedErrorKind::NotQuantifierFree, "type outside the fragment: " + to_string(t));
}

namespace {

SourceTerm forget(const Term& m, std::vector<std::string>& scope, const std::set<std::string>& free) {
  if (const auto* v = m.as<Term::Var>()) {
    if (v->ref.is_free()) return SourceTerm::var(v->ref.name());
    return SourceTerm::var(scope[scope.size() - 1 - v->ref.index()]);
  }
  if (const auto* i = m.as<Term::IntLit>()) return SourceTerm::int_lit(static_cast<std::int64_t>(i->value));
  if (const auto* l = m.as<Term::Lam>()) {
    std::string x = fresh_name(l->hint, scope, free);
    SourceType t = forget_to_circle(l->annot);
    scope.push_back(x);
    SourceTerm body = forget(l->body, scope, free);
    scope.pop_back();
    return SourceTerm::lam(x, t, body);
  }
  if (const auto* a = m.as<Term::App>()) return SourceTerm::app(forget(a->fn, scope, free), forget(a->arg, scope, free));
  if (const auto* n = m.as<Term::Next>()) return SourceTerm::unary(K::Next, forget(n->body, scope, free));
  if (const auto* p = m.as<Term::Prev>()) return SourceTerm::unary(K::Prev, forget(p->body, scope, free));
  if (m.is<Term::Gen>() || m.is<Term::TApp>() || m.is<Term::SIns>())
    throw EmbedError(EmbedErrorKind::NotQuantifierFree, to_string(m));
  throw EmbedError(EmbedErrorKind::NotQuantifierFree, "construct outside the fragment: " + to_string(m));
}

}  // namespace

SourceTerm forget_to_circle(const Term& m) {
  std::vector<std::string> scope;
  return forget(m, scope, free_term_vars(m));
}

std::vector<SourceTerm> circle_reducts(const SourceTerm& m) {
  std::vector<SourceTerm> out;
  if (is_beta_redex(m)) out.push_back(contract_beta(m));
  if (m.kind == K::Prev && m.args[0].kind == K::Next) out.push_back(m.args[0].args[0]);
  congruence(m, circle_reducts, out);
  return out;
}

// ---------------------------------------------------------------- box

SourceType box_typecheck(const BoxContext& g, const SourceTerm& m) {
  if (g.empty()) type_error("empty context stack");
  switch (m.kind) {
    case K::Var: {
      const auto& top = g.back();
      for (auto it = top.rbegin(); it != top.rend(); ++it)
        if (it->first == m.name) return it->second;
      type_error("variable " + m.name + " is not in the innermost context");
    }
    case K::IntLit: return SourceType::integer();
    case K::Lam: {
      if (!m.annot) type_error("lambda without a domain type");
      BoxContext inner = g;
      inner.back().push_back({m.name, *m.annot});
      return SourceType::arrow(*m.annot, box_typecheck(inner, m.args[0]));
    }
    case K::App: {
      SourceType f = expect_arrow(box_typecheck(g, m.args[0]), "function");
      expect_same(box_typecheck(g, m.args[1]), f.args[0], "argument");
      return f.args[1];
    }
    case K::Box: {
      BoxContext inner = g;
      inner.emplace_back();
      return SourceType::box(box_typecheck(inner, m.args[0]));
    }
    case K::Unbox: {
      if (m.number < 0 || static_cast<std::size_t>(m.number) >= g.size())
        type_error("unbox " + std::to_string(m.number) + " with " + std::to_string(g.size()) + " contexts");
      BoxContext outer(g.begin(), g.end() - m.number);
      SourceType t = box_typecheck(outer, m.args[0]);
      if (t.kind != TK::Box) type_error("unbox of non-box type " + to_string(t));
      return t.args[0];
    }
    default: type_error("construct not in the box calculus: " + to_string(m));
  }
}

Type embed_box(const SourceType& t) {
  switch (t.kind) {
    case TK::Base: return Type::base(t.name);
    case TK::Int: return Type::integer();
    case TK::Arrow: return Type::arrow(embed_box(t.args[0]), embed_box(t.args[1]));
    case TK::Box: return Type::forall("a", Type::code(TransitionVar::bound(0), embed_box(t.args[0])));
    default: type_error("type not in the box calculus: " + to_string(t));
  }
}

Term embed_box(const SourceTerm& m, const Transition& a) {
  switch (m.kind) {
    case K::Var: return Term::free_var(m.name);
    case K::IntLit: return Term::int_lit(m.number);
    case K::Lam:
      if (!m.annot) throw EmbedError(EmbedErrorKind::MissingAnnotation, "lambda " + m.name);
      return lam_term(m.name, embed_box(*m.annot), embed_box(m.args[0], a));
    case K::App: return Term::app(embed_box(m.args[0], a), embed_box(m.args[1], a));
    case K::Box: {
      std::set<std::string> taken = fmv(a);
      std::string v = fresh_name("a", {}, taken);
      TransitionVar alpha = TransitionVar::free(v);
      return Term::gen(v, abstract_transition(Term::next(alpha, embed_box(m.args[0], a + alpha)), v));
    }
    case K::Unbox: {
      if (m.number < 0 || static_cast<std::size_t>(m.number) > a.size())
        throw EmbedError(EmbedErrorKind::StackTooShallow,
                         "unbox " + std::to_string(m.number) + " at a stage of length " + std::to_string(a.size()));
      std::vector<TransitionVar> vs(a.begin(), a.end());
      std::size_t split = vs.size() - static_cast<std::size_t>(m.number);
      Transition prefix(std::vector<TransitionVar>(vs.begin(), vs.begin() + static_cast<std::ptrdiff_t>(split)));
      Transition suffix(std::vector<TransitionVar>(vs.begin() + static_cast<std::ptrdiff_t>(split), vs.end()));
      return Term::prev(suffix, Term::tapp(embed_box(m.args[0], prefix), suffix));
    }
    default: type_error("construct not in the box calculus: " + to_string(m));
  }
}

TypingContext embed_box(const BoxContext& g, const Transition& a) {
  if (g.size() != a.size() + 1) type_error("stage length must equal the number of contexts minus one");
  TypingContext out;
  std::vector<TransitionVar> vs(a.begin(), a.end());
  for (std::size_t i = 0; i < g.size(); ++i) {
    Transition stage(std::vector<TransitionVar>(vs.begin(), vs.begin() + static_cast<std::ptrdiff_t>(i)));
    for (const auto& [x, t] : g[i]) out.bind(x, embed_box(t), stage);
  }
  return out;
}

std::vector<SourceTerm> box_beta_reducts(const SourceTerm& m) {
  std::vector<SourceTerm> out;
  if (is_beta_redex(m)) out.push_back(contract_beta(m));
  congruence(m, box_beta_reducts, out);
  return out;
}

// ---------------------------------------------------------------- classifier calculus

namespace {

void classifiers(const SourceType& t, std::set<std::string>& out) {
  if (t.kind == TK::CodeAt) out.insert(t.name);
  for (const auto& a : t.args) classifiers(a, out);
}

}  // namespace

SourceType lambda_i_typecheck(const LambdaIContext& g, const std::vector<std::string>& stage, const SourceTerm& m) {
  auto need_classifier = [&] {
    if (m.name.empty()) type_error("missing classifier on " + to_string(m));
  };
  switch (m.kind) {
    case K::Var:
      for (auto it = g.rbegin(); it != g.rend(); ++it)
        if (it->name == m.name) {
          if (it->stage != stage) type_error(m.name + " is used at a different stage than declared");
          return it->type;
        }
      type_error("unbound variable " + m.name);
    case K::IntLit: return SourceType::integer();
    case K::Lam: {
      if (!m.annot) type_error("lambda without a domain type");
      LambdaIContext inner = g;
      inner.push_back({m.name, *m.annot, stage});
      return SourceType::arrow(*m.annot, lambda_i_typecheck(inner, stage, m.args[0]));
    }
    case K::App: {
      SourceType f = expect_arrow(lambda_i_typecheck(g, stage, m.args[0]), "function");
      expect_same(lambda_i_typecheck(g, stage, m.args[1]), f.args[0], "argument");
      return f.args[1];
    }
    case K::Bracket: {
      need_classifier();
      auto inner = stage;
      inner.push_back(m.name);
      return SourceType::code_at(lambda_i_typecheck(g, inner, m.args[0]), m.name);
    }
    case K::Escape: {
      need_classifier();
      if (stage.empty() || stage.back() != m.name) type_error("escape of " + m.name + " at a stage not ending with it");
      auto outer = stage;
      outer.pop_back();
      SourceType t = lambda_i_typecheck(g, outer, m.args[0]);
      if (t.kind != TK::CodeAt || t.name != m.name) type_error("escape of type " + to_string(t));
      return t.args[0];
    }
    case K::Run: {
      SourceType t = lambda_i_typecheck(g, stage, m.args[0]);
      if (t.kind != TK::Closed) type_error("run of type " + to_string(t));
      return t.args[0];
    }
    case K::Open: {
      need_classifier();
      SourceType t = lambda_i_typecheck(g, stage, m.args[0]);
      if (t.kind != TK::Closed) type_error("open of type " + to_string(t));
      return SourceType::code_at(t.args[0], m.name);
    }
    case K::Close: {
      need_classifier();
      SourceType t = lambda_i_typecheck(g, stage, m.args[0]);
      if (t.kind != TK::CodeAt || t.name != m.name) type_error("close of type " + to_string(t));
      std::set<std::string> used(stage.begin(), stage.end());
      for (const auto& b : g) {
        used.insert(b.stage.begin(), b.stage.end());
        classifiers(b.type, used);
      }
      classifiers(t.args[0], used);
      if (used.count(m.name)) type_error("classifier " + m.name + " escapes through close");
      return SourceType::closed(t.args[0]);
    }
    case K::Csp: {
      if (stage.empty()) type_error("cross-stage persistence at the empty stage");
      auto outer = stage;
      outer.pop_back();
      return lambda_i_typecheck(g, outer, m.args[0]);
    }
    default: type_error("construct not in the classifier calculus: " + to_string(m));
  }
}

Type embed_lambda_i(const SourceType& t) {
  switch (t.kind) {
    case TK::Base: return Type::base(t.name);
    case TK::Int: return Type::integer();
    case TK::Arrow: return Type::arrow(embed_lambda_i(t.args[0]), embed_lambda_i(t.args[1]));
    case TK::CodeAt: return Type::code(TransitionVar::free(t.name), embed_lambda_i(t.args[0]));
    case TK::Closed: return Type::forall("a", Type::code(TransitionVar::bound(0), shift(embed_lambda_i(t.args[0]), 1)));
    default: type_error("type not in the classifier calculus: " + to_string(t));
  }
}

Term embed_lambda_i(const SourceTerm& m) {
  auto classifier = [&] {
    if (m.name.empty()) throw EmbedError(EmbedErrorKind::MissingAnnotation, "classifier on " + to_string(m));
    return TransitionVar::free(m.name);
  };
  switch (m.kind) {
    case K::Var: return Term::free_var(m.name);
    case K::IntLit: return Term::int_lit(m.number);
    case K::Lam:
      if (!m.annot) throw EmbedError(EmbedErrorKind::MissingAnnotation, "domain type of lambda " + m.name);
      return lam_term(m.name, embed_lambda_i(*m.annot), embed_lambda_i(m.args[0]));
    case K::App: return Term::app(embed_lambda_i(m.args[0]), embed_lambda_i(m.args[1]));
    case K::Bracket: return Term::next(classifier(), embed_lambda_i(m.args[0]));
    case K::Escape: return Term::prev(classifier(), embed_lambda_i(m.args[0]));
    case K::Run: return Term::tapp(embed_lambda_i(m.args[0]), Transition{});
    case K::Open: return Term::tapp(embed_lambda_i(m.args[0]), Transition{classifier()});
    case K::Close: {
      TransitionVar v = classifier();
      return Term::gen(v.name(), abstract_transition(embed_lambda_i(m.args[0]), v.name()));
    }
    case K::Csp: throw EmbedError(EmbedErrorKind::CSPPresent, to_string(m));
    default: type_error("construct not in the classifier calculus: " + to_string(m));
  }
}

Transition classifier_stage(const std::vector<std::string>& stage) {
  std::vector<TransitionVar> vs;
  for (const auto& c : stage) vs.push_back(TransitionVar::free(c));
  return Transition(std::move(vs));
}

TypingContext embed_lambda_i(const LambdaIContext& g) {
  TypingContext out;
  for (const auto& b : g) out.bind(b.name, embed_lambda_i(b.type), classifier_stage(b.stage));
  return out;
}

// ---------------------------------------------------------------- syntax

namespace {

class SourceParser {
 public:
  SourceParser(TokenStream& ts, Dialect d) : ts_(ts), d_(d) {}

  SourceType type() {
    SourceType l = prefix_type();
    if (ts_.accept_sym("->")) return SourceType::arrow(l, type());
    return l;
  }

  SourceTerm term() {
    if (ts_.accept_sym("\\")) {
      std::string x = ident();
      std::optional<SourceType> t;
      if (ts_.accept_sym(":")) t = type();
      ts_.expect_sym(".");
      return SourceTerm::lam(x, t, term());
    }
    SourceTerm f = prefix_term();
    while (at_prefix_start()) f = SourceTerm::app(f, prefix_term());
    return f;
  }

 private:
  bool keyword(std::string_view w) const {
    switch (d_) {
      case Dialect::Circle: return w == "next" || w == "prev" || w == "circle";
      case Dialect::Box: return w == "box" || w == "unbox";
      case Dialect::LambdaI: return w == "bracket" || w == "esc" || w == "run" || w == "open" || w == "close";
    }
    return false;
  }

  std::string ident() {
    if (ts_.peek().kind != Tok::Ident || keyword(ts_.peek().text)) ts_.fail("expected identifier");
    return ts_.take().text;
  }

  SourceType prefix_type() {
    if (d_ == Dialect::Circle && ts_.accept_word("circle")) return SourceType::circle(prefix_type());
    if (d_ == Dialect::Box && ts_.accept_word("box")) return SourceType::box(prefix_type());
    if (d_ == Dialect::LambdaI && ts_.accept_sym("<")) {
      SourceType t = type();
      ts_.expect_sym(">");
      if (ts_.accept_sym("@")) return SourceType::code_at(t, ident());
      return SourceType::closed(t);
    }
    if (ts_.accept_sym("(")) {
      SourceType t = type();
      ts_.expect_sym(")");
      return t;
    }
    if (ts_.accept_word("int")) return SourceType::integer();
    return SourceType::base(ident());
  }

  bool at_prefix_start() const {
    const Token& t = ts_.peek();
    if (t.kind == Tok::Int) return true;
    if (t.kind == Tok::Ident) return true;
    return ts_.at_sym("(") || (d_ == Dialect::LambdaI && ts_.at_sym("%"));
  }

  std::string optional_classifier() {
    if (!ts_.accept_sym("[")) return {};
    std::string c = ident();
    ts_.expect_sym("]");
    return c;
  }

  SourceTerm prefix_term() {
    if (d_ == Dialect::Circle) {
      if (ts_.accept_word("next")) return SourceTerm::unary(K::Next, prefix_term());
      if (ts_.accept_word("prev")) return SourceTerm::unary(K::Prev, prefix_term());
    }
    if (d_ == Dialect::Box) {
      if (ts_.accept_word("box")) return SourceTerm::unary(K::Box, prefix_term());
      if (ts_.accept_word("unbox")) {
        ts_.expect_sym("[");
        if (ts_.peek().kind != Tok::Int) ts_.fail("expected unbox depth");
        std::int64_t n = std::stoll(ts_.take().text);
        ts_.expect_sym("]");
        return SourceTerm::unbox(n, prefix_term());
      }
    }
    if (d_ == Dialect::LambdaI) {
      static const std::pair<const char*, K> kClassified[] = {
          {"bracket", K::Bracket}, {"esc", K::Escape}, {"open", K::Open}, {"close", K::Close}};
      for (const auto& [w, k] : kClassified)
        if (ts_.accept_word(w)) {
          std::string c = optional_classifier();
          return SourceTerm::unary(k, prefix_term(), c);
        }
      if (ts_.accept_word("run")) return SourceTerm::unary(K::Run, prefix_term());
      if (ts_.accept_sym("%")) return SourceTerm::unary(K::Csp, prefix_term());
    }
    return atom();
  }

  SourceTerm atom() {
    if (ts_.peek().kind == Tok::Int) return SourceTerm::int_lit(std::stoll(ts_.take().text));
    if (ts_.accept_sym("(")) {
      SourceTerm t = term();
      ts_.expect_sym(")");
      return t;
    }
    return SourceTerm::var(ident());
  }

  TokenStream& ts_;
  Dialect d_;
};

std::string print_type(const SourceType& t, bool arrow_parens) {
  switch (t.kind) {
    case TK::Base: return t.name;
    case TK::Int: return "int";
    case TK::Arrow: {
      std::string s = print_type(t.args[0], true) + " -> " + print_type(t.args[1], false);
      return arrow_parens ? "(" + s + ")" : s;
    }
    case TK::Circle: return "circle " + print_type(t.args[0], true);
    case TK::Box: return "box " + print_type(t.args[0], true);
    case TK::CodeAt: return "<" + print_type(t.args[0], false) + ">@" + t.name;
    case TK::Closed: return "<" + print_type(t.args[0], false) + ">";
  }
  return "?";
}

// prec 0: any term; 1: application head; 2: argument or prefix operand.
std::string print_term(const SourceTerm& m, int prec) {
  auto paren = [](bool p, const std::string& s) { return p ? "(" + s + ")" : s; };
  auto unary = [&](const std::string& op) { return op + " " + print_term(m.args[0], 2); };
  auto classified = [&](const std::string& op) {
    return op + (m.name.empty() ? "" : "[" + m.name + "]") + " " + print_term(m.args[0], 2);
  };
  switch (m.kind) {
    case K::Var: return m.name;
    case K::IntLit: return std::to_string(m.number);
    case K::Lam:
      return paren(prec > 0, "\\" + m.name + (m.annot ? ":" + print_type(*m.annot, false) : "") + ". " +
                                 print_term(m.args[0], 0));
    case K::App: return paren(prec > 1, print_term(m.args[0], 1) + " " + print_term(m.args[1], 2));
    case K::Next: return unary("next");
    case K::Prev: return unary("prev");
    case K::Box: return unary("box");
    case K::Unbox: return "unbox[" + std::to_string(m.number) + "] " + print_term(m.args[0], 2);
    case K::Bracket: return classified("bracket");
    case K::Escape: return classified("esc");
    case K::Run: return unary("run");
    case K::Open: return classified("open");
    case K::Close: return classified("close");
    case K::Csp: return "%" + print_term(m.args[0], 2);
  }
  return "?";
}

}  // namespace

SourceTerm parse_source_term(Dialect d, std::string_view src) {
  TokenStream ts(src);
  SourceParser p(ts, d);
  SourceTerm t = p.term();
  ts.expect_end();
  return t;
}

SourceType parse_source_type(Dialect d, std::string_view src) {
  TokenStream ts(src);
  SourceParser p(ts, d);
  SourceType t = p.type();
  ts.expect_end();
  return t;
}

std::string to_string(const SourceTerm& m) { return print_term(m, 0); }
std::string to_string(const SourceType& t) { return print_type(t, false); }

std::optional<Dialect> dialect_from_name(std::string_view name) {
  if (name == "circle") return Dialect::Circle;
  if (name == "box") return Dialect::Box;
  if (name == "lambda-i") return Dialect::LambdaI;
  return std::nullopt;
}

// ---------------------------------------------------------------- generators

namespace {

class SourceRng {
 public:
  explicit SourceRng(std::uint64_t seed) : rng_(seed) {}
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::size_t weighted(const std::vector<std::size_t>& w) {
    std::size_t total = 0;
    for (auto x : w) total += x;
    std::size_t r = below(total);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (r < w[i]) return i;
      r -= w[i];
    }
    return w.size() - 1;
  }
  std::size_t size_in(std::size_t max) { return max / 2 + below(max - max / 2 + 1); }

 private:
  std::mt19937_64 rng_;
};

// Modal type constructor used by the calculus being generated.
SourceType random_source_type(SourceRng& r, std::size_t depth, TK modal, const std::vector<std::string>& classifiers,
                              const SourceType& base) {
  if (depth == 0 || r.chance(0.35)) return base;
  switch (r.below(3)) {
    case 0:
      return SourceType::arrow(random_source_type(r, depth - 1, modal, classifiers, base),
                               random_source_type(r, depth - 1, modal, classifiers, base));
    case 1:
      if (modal == TK::CodeAt)
        return SourceType::code_at(random_source_type(r, depth - 1, modal, classifiers, base),
                                   classifiers[r.below(classifiers.size())]);
      return {modal, {}, {random_source_type(r, depth - 1, modal, classifiers, base)}};
    default:
      if (modal == TK::CodeAt) return SourceType::closed(random_source_type(r, depth - 1, modal, classifiers, base));
      return random_source_type(r, depth - 1, modal, classifiers, base);
  }
}

std::size_t modal_depth(const SourceType& t) {
  std::size_t d = 0;
  for (const auto& a : t.args) d = std::max(d, modal_depth(a));
  return d + (t.kind == TK::Circle || t.kind == TK::Box || t.kind == TK::CodeAt || t.kind == TK::Closed ? 1 : 0);
}

class CircleGenerator {
 public:
  CircleGenerator(SourceRng& r) : r_(r) {
    for (std::size_t i = 0; i <= kMaxLevel; ++i) ctx_.push_back({"c" + std::to_string(i), SourceType::base("b"), i});
  }
  const CircleContext& base_context() const { return ctx_; }

  SourceTerm gen(std::size_t level, const SourceType& t, std::size_t size) {
    std::vector<const CircleBinding*> vars;
    for (const auto& b : ctx_)
      if (b.level == level && b.type == t) vars.push_back(&b);
    if (size <= 1) return terminal(level, t, vars);
    bool arrow = t.kind == TK::Arrow;
    bool circle = t.kind == TK::Circle;
    bool can_raise = level + 1 < kMaxLevel;
    std::vector<std::size_t> w = {vars.empty() ? 0u : 1u, arrow ? 4u : 0u, circle ? 4u : 0u, level > 0 ? 1u : 0u,
                                  3u, 2u, level > 0 && can_raise ? 1u : 0u};
    switch (r_.weighted(w)) {
      case 0: return SourceTerm::var(vars[r_.below(vars.size())]->name);
      case 1: return lam(level, t, size);
      case 2: return SourceTerm::unary(K::Next, gen(level + 1, t.args[0], size - 1));
      case 3:
        if (modal_depth(t) + level < kMaxLevel) return SourceTerm::unary(K::Prev, gen(level - 1, SourceType::circle(t), size - 1));
        return terminal(level, t, vars);
      case 4: {
        SourceType s = arg_type(level);
        std::size_t k = 1 + r_.below(size - 1);
        SourceTerm f = gen(level, SourceType::arrow(s, t), std::max<std::size_t>(k, 1));
        return SourceTerm::app(f, gen(level, s, std::max<std::size_t>(size - k, 1)));
      }
      case 5: {
        SourceType s = arg_type(level);
        std::string x = fresh();
        std::size_t k = 1 + r_.below(size - 1);
        ctx_.push_back({x, s, level});
        SourceTerm body = gen(level, t, std::max<std::size_t>(k, 1));
        ctx_.pop_back();
        return SourceTerm::app(SourceTerm::lam(x, s, body), gen(level, s, std::max<std::size_t>(size - k, 1)));
      }
      default:
        return SourceTerm::unary(K::Prev, SourceTerm::unary(K::Next, gen(level, t, size - 2 > 0 ? size - 2 : 1)));
    }
  }

  static constexpr std::size_t kMaxLevel = 6;

 private:
  SourceType arg_type(std::size_t level) {
    SourceType s = random_source_type(r_, 2, TK::Circle, {}, SourceType::base("b"));
    while (level + modal_depth(s) >= kMaxLevel) s = s.kind == TK::Circle || s.kind == TK::Arrow ? s.args.back() : s;
    return s;
  }

  SourceTerm lam(std::size_t level, const SourceType& t, std::size_t size) {
    std::string x = fresh();
    ctx_.push_back({x, t.args[0], level});
    SourceTerm body = gen(level, t.args[1], size - 1);
    ctx_.pop_back();
    return SourceTerm::lam(x, t.args[0], body);
  }

  SourceTerm terminal(std::size_t level, const SourceType& t, const std::vector<const CircleBinding*>& vars) {
    if (!vars.empty()) return SourceTerm::var(vars[r_.below(vars.size())]->name);
    if (t.kind == TK::Arrow) return lam(level, t, 1);
    if (t.kind == TK::Circle) return SourceTerm::unary(K::Next, gen(level + 1, t.args[0], 1));
    return SourceTerm::var("c" + std::to_string(level));
  }

  std::string fresh() { return "x" + std::to_string(counter_++); }

  SourceRng& r_;
  CircleContext ctx_;
  std::size_t counter_ = 0;
};

class BoxGenerator {
 public:
  BoxGenerator(SourceRng& r, std::size_t depth) : r_(r) {
    stack_.push_back({{"k", SourceType::box(SourceType::base("b"))}, {"c0", SourceType::base("b")}});
    for (std::size_t i = 1; i <= depth; ++i) stack_.push_back({{"c" + std::to_string(i), SourceType::base("b")}});
  }
  const BoxContext& context() const { return stack_; }

  SourceTerm gen(const SourceType& t, std::size_t size) {
    std::vector<std::string> vars;
    for (const auto& [x, ty] : stack_.back())
      if (ty == t) vars.push_back(x);
    if (size <= 1) return terminal(t, vars);
    bool arrow = t.kind == TK::Arrow;
    bool box = t.kind == TK::Box && stack_.size() < kMaxStack;
    std::vector<std::size_t> w = {vars.empty() ? 0u : 1u, arrow ? 4u : 0u, box ? 4u : 0u, 2u, 3u, 2u};
    switch (r_.weighted(w)) {
      case 0: return SourceTerm::var(vars[r_.below(vars.size())]);
      case 1: return lam(t, size);
      case 2: return boxed(t, size - 1);
      case 3: {
        std::size_t n = r_.below(stack_.size());
        BoxContext saved = stack_;
        stack_.resize(stack_.size() - n);
        SourceTerm body = gen(SourceType::box(t), size - 1);
        stack_ = saved;
        return SourceTerm::unbox(static_cast<std::int64_t>(n), body);
      }
      case 4: {
        SourceType s = random_source_type(r_, 2, TK::Box, {}, SourceType::base("b"));
        std::size_t k = 1 + r_.below(size - 1);
        SourceTerm f = gen(SourceType::arrow(s, t), k);
        return SourceTerm::app(f, gen(s, std::max<std::size_t>(size - k, 1)));
      }
      default: {
        SourceType s = random_source_type(r_, 2, TK::Box, {}, SourceType::base("b"));
        std::string x = fresh();
        std::size_t k = 1 + r_.below(size - 1);
        stack_.back().push_back({x, s});
        SourceTerm body = gen(t, k);
        stack_.back().pop_back();
        return SourceTerm::app(SourceTerm::lam(x, s, body), gen(s, std::max<std::size_t>(size - k, 1)));
      }
    }
  }

 private:
  static constexpr std::size_t kMaxStack = 5;

  SourceTerm lam(const SourceType& t, std::size_t size) {
    std::string x = fresh();
    stack_.back().push_back({x, t.args[0]});
    SourceTerm body = gen(t.args[1], size - 1);
    stack_.back().pop_back();
    return SourceTerm::lam(x, t.args[0], body);
  }

  SourceTerm boxed(const SourceType& t, std::size_t size) {
    stack_.emplace_back();
    SourceTerm body = gen(t.args[0], std::max<std::size_t>(size, 1));
    stack_.pop_back();
    return SourceTerm::unary(K::Box, body);
  }

  SourceTerm terminal(const SourceType& t, const std::vector<std::string>& vars) {
    if (!vars.empty()) return SourceTerm::var(vars[r_.below(vars.size())]);
    if (t.kind == TK::Arrow) return lam(t, 1);
    if (t.kind == TK::Box) return boxed(t, 1);
    // k : box b lives in the outermost context
    return SourceTerm::unbox(static_cast<std::int64_t>(stack_.size() - 1), SourceTerm::var("k"));
  }

  std::string fresh() { return "x" + std::to_string(counter_++); }

  SourceRng& r_;
  BoxContext stack_;
  std::size_t counter_ = 0;
};

class LambdaIGenerator {
 public:
  explicit LambdaIGenerator(SourceRng& r) : r_(r) {}

  SourceTerm gen(const std::vector<std::string>& stage, const SourceType& t, std::size_t size) {
    std::vector<std::string> vars;
    for (const auto& b : ctx_)
      if (b.stage == stage && b.type == t) vars.push_back(b.name);
    if (size <= 1) return terminal(stage, t, vars);
    bool code_at = t.kind == TK::CodeAt;
    bool can_open = code_at && !mentions(t.args[0], t.name);
    bool deep = stage.size() >= 4;
    std::vector<std::size_t> w = {vars.empty() ? 0u : 1u,
                                  t.kind == TK::Arrow ? 4u : 0u,
                                  code_at && !deep ? 4u : 0u,
                                  can_open ? 2u : 0u,
                                  t.kind == TK::Closed ? 4u : 0u,
                                  stage.empty() ? 0u : 1u,
                                  1u,
                                  3u,
                                  2u};
    switch (r_.weighted(w)) {
      case 0: return SourceTerm::var(vars[r_.below(vars.size())]);
      case 1: return lam(stage, t, size);
      case 2: return bracket(stage, t, size - 1);
      case 3: return SourceTerm::unary(K::Open, gen(stage, SourceType::closed(t.args[0]), size - 1), t.name);
      case 4: return close(stage, t, size - 1);
      case 5: {
        auto outer = stage;
        outer.pop_back();
        return SourceTerm::unary(K::Escape, gen(outer, SourceType::code_at(t, stage.back()), size - 1), stage.back());
      }
      case 6: return SourceTerm::unary(K::Run, gen(stage, SourceType::closed(t), size - 1));
      case 7: {
        SourceType s = arg_type();
        std::size_t k = 1 + r_.below(size - 1);
        SourceTerm f = gen(stage, SourceType::arrow(s, t), k);
        return SourceTerm::app(f, gen(stage, s, std::max<std::size_t>(size - k, 1)));
      }
      default: {
        SourceType s = arg_type();
        std::string x = fresh("x");
        std::size_t k = 1 + r_.below(size - 1);
        ctx_.push_back({x, s, stage});
        SourceTerm body = gen(stage, t, k);
        ctx_.pop_back();
        return SourceTerm::app(SourceTerm::lam(x, s, body), gen(stage, s, std::max<std::size_t>(size - k, 1)));
      }
    }
  }

 private:
  static bool mentions(const SourceType& t, const std::string& c) {
    std::set<std::string> cs;
    classifiers(t, cs);
    return cs.count(c) > 0;
  }

  SourceType arg_type() { return random_source_type(r_, 2, TK::CodeAt, {"a", "b"}, SourceType::integer()); }

  SourceTerm lam(const std::vector<std::string>& stage, const SourceType& t, std::size_t size) {
    std::string x = fresh("x");
    ctx_.push_back({x, t.args[0], stage});
    SourceTerm body = gen(stage, t.args[1], size - 1);
    ctx_.pop_back();
    return SourceTerm::lam(x, t.args[0], body);
  }

  SourceTerm bracket(const std::vector<std::string>& stage, const SourceType& t, std::size_t size) {
    auto inner = stage;
    inner.push_back(t.name);
    return SourceTerm::unary(K::Bracket, gen(inner, t.args[0], std::max<std::size_t>(size, 1)), t.name);
  }

  SourceTerm close(const std::vector<std::string>& stage, const SourceType& t, std::size_t size) {
    std::string c = fresh("k");
    return SourceTerm::unary(K::Close, gen(stage, SourceType::code_at(t.args[0], c), std::max<std::size_t>(size, 1)), c);
  }

  SourceTerm terminal(const std::vector<std::string>& stage, const SourceType& t, const std::vector<std::string>& vars) {
    if (!vars.empty()) return SourceTerm::var(vars[r_.below(vars.size())]);
    switch (t.kind) {
      case TK::Arrow: return lam(stage, t, 1);
      case TK::CodeAt: return bracket(stage, t, 1);
      case TK::Closed: return close(stage, t, 1);
      default: return SourceTerm::int_lit(static_cast<std::int64_t>(r_.below(10)));
    }
  }

  std::string fresh(const char* prefix) { return prefix + std::to_string(counter_++); }

  SourceRng& r_;
  LambdaIContext ctx_;
  std::size_t counter_ = 0;
};

}  // namespace

CircleSample random_circle_sample(std::uint64_t seed, std::size_t max_size) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    SourceRng r(seed * 7919 + attempt);
    CircleGenerator g(r);
    std::size_t level = r.below(2);
    SourceType t = random_source_type(r, 3, TK::Circle, {}, SourceType::base("b"));
    if (modal_depth(t) + level >= CircleGenerator::kMaxLevel) continue;
    SourceTerm m = g.gen(level, t, r.size_in(max_size));
    CircleSample s{g.base_context(), level, m, t};
    try {
      if (circle_typecheck(s.context, level, m) == t) return s;
    } catch (const SourceTypeError&) {
    }
  }
}

BoxSample random_box_sample(std::uint64_t seed, std::size_t max_size) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    SourceRng r(seed * 7919 + attempt);
    std::size_t depth = r.below(3);
    BoxGenerator g(r, depth);
    SourceType t = random_source_type(r, 3, TK::Box, {}, SourceType::base("b"));
    SourceTerm m = g.gen(t, r.size_in(max_size));
    std::vector<TransitionVar> vs;
    for (std::size_t i = 1; i <= depth; ++i) vs.push_back(TransitionVar::free("s" + std::to_string(i)));
    BoxSample s{g.context(), Transition(std::move(vs)), m, t};
    try {
      if (box_typecheck(s.context, m) == t) return s;
    } catch (const SourceTypeError&) {
    }
  }
}

LambdaISample random_lambda_i_sample(std::uint64_t seed, std::size_t max_size) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    SourceRng r(seed * 7919 + attempt);
    LambdaIGenerator g(r);
    std::vector<std::string> stage;
    for (std::size_t i = r.below(3); i > 0; --i) stage.push_back(i % 2 ? "a" : "b");
    SourceType t = random_source_type(r, 3, TK::CodeAt, {"a", "b"}, SourceType::integer());
    SourceTerm m = g.gen(stage, t, r.size_in(max_size));
    LambdaISample s{{}, stage, m, t};
    try {
      if (lambda_i_typecheck(s.context, stage, m) == t) return s;
    } catch (const SourceTypeError&) {
    }
  }
}

}  // namespace stagecraft
