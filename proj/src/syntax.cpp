#include "stagecraft/syntax.hpp"

#include <algorithm>
#include <sstream>

namespace stagecraft {

namespace {

template <class V>
std::optional<std::uint32_t> lookup_scope(const std::vector<std::string>& scope, const std::string& name) {
  for (std::size_t i = scope.size(); i-- > 0;)
    if (scope[i] == name) return static_cast<std::uint32_t>(scope.size() - 1 - i);
  return std::nullopt;
}

bool starts_expr_form(const TokenStream& ts) {
  return ts.at_sym("\\") || ts.at_word("fix") || ts.at_word("gen") || ts.at_word("if") || ts.at_word("let");
}

}  // namespace

Type CoreParser::type() {
  if (ts_.accept_word("forall")) {
    std::string a = ts_.expect_ident();
    std::optional<Transition> stage;
    if (ts_.accept_sym("@")) stage = bracketed_transition();
    ts_.expect_sym(".");
    trans_scope_.push_back(a);
    Type body = type();
    trans_scope_.pop_back();
    return stage ? Type::forall_at(a, *stage, body) : Type::forall(a, body);
  }
  return arrow_type();
}

Type CoreParser::arrow_type() {
  Type l = prefix_type();
  if (ts_.accept_sym("->")) return Type::arrow(l, type());
  return l;
}

Type CoreParser::prefix_type() {
  if (ts_.accept_sym("<")) {
    TransitionVar v = transition_var();
    ts_.expect_sym(">");
    Type body = ts_.at_word("forall") ? type() : prefix_type();
    return Type::code(v, body);
  }
  if (ts_.accept_sym("~")) return Type::negation(prefix_type());
  return atom_type();
}

Type CoreParser::atom_type() {
  if (ts_.accept_word("int")) return Type::integer();
  if (ts_.accept_word("bool")) return Type::boolean();
  if (ts_.accept_word("bot")) return Type::bot();
  if (ts_.accept_sym("(")) {
    Type t = type();
    ts_.expect_sym(")");
    return t;
  }
  return Type::base(ts_.expect_ident());
}

TransitionVar CoreParser::transition_var() {
  std::string a = ts_.expect_ident();
  if (auto i = lookup_scope<TransitionVar>(trans_scope_, a)) return TransitionVar::bound(*i);
  return TransitionVar::free(a);
}

Transition CoreParser::bracketed_transition() {
  ts_.expect_sym("[");
  std::vector<TransitionVar> vs;
  while (!ts_.at_sym("]")) vs.push_back(transition_var());
  ts_.expect_sym("]");
  return Transition(std::move(vs));
}

Term CoreParser::term() {
  if (ts_.accept_sym("\\")) {
    std::string x = ts_.expect_ident();
    ts_.expect_sym(":");
    Type t = type();
    ts_.expect_sym(".");
    term_scope_.push_back(x);
    Term body = term();
    term_scope_.pop_back();
    return Term::lam(x, t, body);
  }
  if (ts_.accept_word("fix")) {
    std::string f = ts_.expect_ident();
    ts_.expect_sym(":");
    Type t = type();
    ts_.expect_sym(".");
    term_scope_.push_back(f);
    Term body = term();
    term_scope_.pop_back();
    return Term::fix(f, t, body);
  }
  if (ts_.accept_word("gen")) {
    std::string a = ts_.expect_ident();
    ts_.expect_sym(".");
    trans_scope_.push_back(a);
    Term body = term();
    trans_scope_.pop_back();
    return Term::gen(a, body);
  }
  if (ts_.accept_word("if")) {
    Term c = term();
    ts_.expect_word("then");
    Term t = term();
    ts_.expect_word("else");
    Term e = term();
    return Term::if_(c, t, e);
  }
  if (ts_.accept_word("let")) {
    std::string x = ts_.expect_ident();
    ts_.expect_sym(":");
    Type t = type();
    ts_.expect_sym("=");
    Term m = term();
    ts_.expect_word("in");
    term_scope_.push_back(x);
    Term n = term();
    term_scope_.pop_back();
    return Term::app(Term::lam(x, t, n), m);
  }
  return eq_term();
}

Term CoreParser::eq_term() {
  Term l = add_term();
  if (ts_.accept_sym("=")) return Term::binop(BinOpKind::Eq, l, add_term());
  return l;
}

Term CoreParser::add_term() {
  Term l = mul_term();
  while (true) {
    if (ts_.accept_sym("+"))
      l = Term::binop(BinOpKind::Add, l, mul_term());
    else if (ts_.accept_sym("-"))
      l = Term::binop(BinOpKind::Sub, l, mul_term());
    else
      return l;
  }
}

Term CoreParser::mul_term() {
  Term l = prefix_term();
  while (ts_.accept_sym("*")) l = Term::binop(BinOpKind::Mul, l, prefix_term());
  return l;
}

Term CoreParser::prefix_term() {
  for (bool is_next : {true, false}) {
    if (ts_.accept_word(is_next ? "next" : "prev")) {
      ts_.expect_sym("[");
      TransitionVar v = transition_var();
      ts_.expect_sym("]");
      Term body = starts_expr_form(ts_) ? term() : prefix_term();
      return is_next ? Term::next(v, body) : Term::prev(v, body);
    }
  }
  return app_term();
}

bool CoreParser::at_atom_start() const {
  const Token& t = ts_.peek();
  if (t.kind == Tok::Int) return true;
  if (t.kind == Tok::Ident) return !is_keyword(t.text) || t.text == "true" || t.text == "false";
  return ts_.at_sym("(");
}

Term CoreParser::app_term() {
  Term f = atom_term();
  while (true) {
    if (at_atom_start()) {
      f = Term::app(f, atom_term());
    } else if (ts_.at_sym("@") && ts_.at_sym("[", 1)) {
      ts_.take();
      f = Term::tapp(f, bracketed_transition());
    } else if (ts_.accept_sym("@!")) {
      f = Term::sins(f, transition_var());
    } else {
      return f;
    }
  }
}

Term CoreParser::atom_term() {
  const Token& t = ts_.peek();
  if (t.kind == Tok::Int) return Term::int_lit(Integer(ts_.take().text));
  if (ts_.accept_word("true")) return Term::bool_lit(true);
  if (ts_.accept_word("false")) return Term::bool_lit(false);
  if (ts_.accept_sym("(")) {
    if (ts_.at_sym("-") && ts_.peek(1).kind == Tok::Int && ts_.at_sym(")", 2)) {
      ts_.take();
      Integer v(ts_.take().text);
      ts_.take();
      return Term::int_lit(-v);
    }
    Term m = term();
    ts_.expect_sym(")");
    return m;
  }
  std::string x = ts_.expect_ident();
  if (auto i = lookup_scope<VarRef>(term_scope_, x)) return Term::bound_var(*i);
  return Term::free_var(x);
}

Type parse_type(std::string_view src) {
  TokenStream ts(src);
  CoreParser p(ts);
  Type t = p.type();
  ts.expect_end();
  return t;
}

Term parse_term(std::string_view src) {
  TokenStream ts(src);
  CoreParser p(ts);
  Term t = p.term();
  ts.expect_end();
  return t;
}

Transition parse_transition(std::string_view src) {
  TokenStream ts(src);
  bool bracket = ts.accept_sym("[");
  std::vector<TransitionVar> vs;
  while (ts.peek().kind == Tok::Ident) {
    std::string a = ts.expect_ident();
    if (a != "eps") vs.push_back(TransitionVar::free(a));
  }
  if (bracket) ts.expect_sym("]");
  ts.expect_end();
  return Transition(std::move(vs));
}

TypingContext parse_context(std::string_view src) {
  TokenStream ts(src);
  CoreParser p(ts);
  TypingContext g;
  while (!ts.at_end()) {
    std::string x = ts.expect_ident();
    ts.expect_sym(":");
    Type t = p.type();
    Transition stage;
    if (ts.accept_sym("@")) stage = p.bracketed_transition();
    g.bind(x, t, stage);
    if (!ts.accept_sym(",")) break;
  }
  ts.expect_end();
  return g;
}

TransitionEnv parse_transition_env(std::string_view src) {
  TokenStream ts(src);
  CoreParser p(ts);
  TransitionEnv d;
  while (!ts.at_end()) {
    std::string a = ts.expect_ident();
    ts.expect_sym("@");
    d.declare(a, p.bracketed_transition());
    if (!ts.accept_sym(",")) break;
  }
  ts.expect_end();
  return d;
}

std::string fresh_name(const std::string& hint, const std::vector<std::string>& taken_a,
                       const std::set<std::string>& taken_b) {
  std::string base = hint;
  while (!base.empty() && std::isdigit(static_cast<unsigned char>(base.back()))) base.pop_back();
  if (base.empty() || is_keyword(base) || base == "eps") base = "v";
  auto taken = [&](const std::string& n) {
    return is_keyword(n) || taken_b.count(n) ||
           std::find(taken_a.begin(), taken_a.end(), n) != taken_a.end();
  };
  if (!hint.empty() && !taken(hint) && !is_keyword(hint)) return hint;
  if (!taken(base)) return base;
  for (std::size_t k = 1;; ++k) {
    std::string n = base + std::to_string(k);
    if (!taken(n)) return n;
  }
}

namespace {

class Printer {
 public:
  Printer(std::set<std::string> free_terms, std::set<std::string> free_trans, bool prop_mode)
      : free_terms_(std::move(free_terms)), free_trans_(std::move(free_trans)), prop_mode_(prop_mode) {}

  void type(std::ostream& os, const Type& t, int ctx) {
    int prec = type_prec(t);
    bool paren = prec < ctx;
    if (paren) os << '(';
    std::visit(
        [&](const auto& x) {
          using N = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<N, Type::Base>) {
            os << x.name;
          } else if constexpr (std::is_same_v<N, Type::Int>) {
            os << "int";
          } else if constexpr (std::is_same_v<N, Type::Bool>) {
            os << "bool";
          } else if constexpr (std::is_same_v<N, Type::Bot>) {
            os << "bot";
          } else if constexpr (std::is_same_v<N, Type::Arrow>) {
            if (prop_mode_ && x.cod.template is<Type::Bot>()) {
              os << '~';
              type(os, x.dom, 2);
            } else {
              type(os, x.dom, 2);
              os << " -> ";
              type(os, x.cod, 1);
            }
          } else if constexpr (std::is_same_v<N, Type::Code>) {
            os << '<' << tvar(x.var) << '>';
            type(os, x.body, 2);
          } else if constexpr (std::is_same_v<N, Type::Forall>) {
            std::string a = fresh_name(x.hint.empty() ? "a" : x.hint, trans_, free_trans_);
            os << "forall " << a;
            if (x.stage) {
              os << " @ ";
              transition(os, *x.stage);
            }
            os << ". ";
            trans_.push_back(a);
            type(os, x.body, 0);
            trans_.pop_back();
          }
        },
        t.node().v);
    if (paren) os << ')';
  }

  void term(std::ostream& os, const Term& t, int ctx) {
    int prec = term_prec(t);
    bool paren = prec < ctx;
    if (paren) os << '(';
    std::visit(
        [&](const auto& x) {
          using N = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<N, Term::Var>) {
            os << var(x.ref);
          } else if constexpr (std::is_same_v<N, Term::IntLit>) {
            if (x.value < 0)
              os << "(-" << Integer(-x.value) << ')';
            else
              os << x.value;
          } else if constexpr (std::is_same_v<N, Term::BoolLit>) {
            os << (x.value ? "true" : "false");
          } else if constexpr (std::is_same_v<N, Term::BinOp>) {
            int lc = x.op == BinOpKind::Mul ? 3 : 2;
            int rc = x.op == BinOpKind::Mul ? 4 : x.op == BinOpKind::Eq ? 2 : 3;
            term(os, x.lhs, lc);
            os << (x.op == BinOpKind::Add ? " + " : x.op == BinOpKind::Sub ? " - " : x.op == BinOpKind::Mul ? " * " : " = ");
            term(os, x.rhs, rc);
          } else if constexpr (std::is_same_v<N, Term::If>) {
            os << "if ";
            term(os, x.cond, 0);
            os << " then ";
            term(os, x.then_branch, 0);
            os << " else ";
            term(os, x.else_branch, 0);
          } else if constexpr (std::is_same_v<N, Term::Fix> || std::is_same_v<N, Term::Lam>) {
            std::string n = fresh_name(x.hint.empty() ? "x" : x.hint, terms_, free_terms_);
            os << (std::is_same_v<N, Term::Fix> ? "fix " : "\\") << n << ':';
            type(os, x.annot, 1);
            os << ". ";
            terms_.push_back(n);
            term(os, x.body, 0);
            terms_.pop_back();
          } else if constexpr (std::is_same_v<N, Term::App>) {
            term(os, x.fn, 5);
            os << ' ';
            term(os, x.arg, 6);
          } else if constexpr (std::is_same_v<N, Term::Next> || std::is_same_v<N, Term::Prev>) {
            os << (std::is_same_v<N, Term::Next> ? "next[" : "prev[") << tvar(x.var) << "] ";
            term(os, x.body, 6);
          } else if constexpr (std::is_same_v<N, Term::Gen>) {
            std::string a = fresh_name(x.hint.empty() ? "a" : x.hint, trans_, free_trans_);
            os << "gen " << a << ". ";
            trans_.push_back(a);
            term(os, x.body, 0);
            trans_.pop_back();
          } else if constexpr (std::is_same_v<N, Term::TApp>) {
            term(os, x.body, 5);
            os << " @";
            transition(os, x.arg);
          } else {
            term(os, x.body, 5);
            os << " @! " << tvar(x.arg);
          }
        },
        t.node().v);
    if (paren) os << ')';
  }

  void transition(std::ostream& os, const Transition& t) {
    os << '[';
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? " " : "") << tvar(t[i]);
    os << ']';
  }

  std::string tvar(const TransitionVar& v) const {
    if (v.is_free()) return v.name();
    if (v.index() < trans_.size()) return trans_[trans_.size() - 1 - v.index()];
    return "#" + std::to_string(v.index());
  }

  std::string var(const VarRef& v) const {
    if (v.is_free()) return v.name();
    if (v.index() < terms_.size()) return terms_[terms_.size() - 1 - v.index()];
    return "#" + std::to_string(v.index());
  }

 private:
  int type_prec(const Type& t) const {
    if (t.is<Type::Forall>()) return 0;
    if (auto a = t.as<Type::Arrow>()) return prop_mode_ && a->cod.is<Type::Bot>() ? 2 : 1;
    if (t.is<Type::Code>()) return 2;
    return 3;
  }
  int term_prec(const Term& t) const {
    if (t.is<Term::Lam>() || t.is<Term::Fix>() || t.is<Term::Gen>() || t.is<Term::If>()) return 0;
    if (auto b = t.as<Term::BinOp>()) return b->op == BinOpKind::Eq ? 1 : b->op == BinOpKind::Mul ? 3 : 2;
    if (t.is<Term::Next>() || t.is<Term::Prev>()) return 4;
    if (t.is<Term::App>() || t.is<Term::TApp>() || t.is<Term::SIns>()) return 5;
    return 6;
  }

  std::set<std::string> free_terms_;
  std::set<std::string> free_trans_;
  bool prop_mode_;
  std::vector<std::string> terms_;
  std::vector<std::string> trans_;
};

}  // namespace

std::string to_string(const Type& t) {
  Printer p({}, fmv(t), false);
  std::ostringstream os;
  p.type(os, t, 0);
  return os.str();
}

std::string prop_to_string(const Type& t) {
  Printer p({}, fmv(t), true);
  std::ostringstream os;
  p.type(os, t, 0);
  return os.str();
}

std::string to_string(const Term& t) {
  Printer p(free_term_vars(t), fmv(t), false);
  std::ostringstream os;
  p.term(os, t, 0);
  return os.str();
}

std::string to_string(const TypingContext& g) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [x, b] : g.entries()) {
    os << (first ? "" : ", ") << x << " : " << to_string(b.type) << " @ " << b.stage;
    first = false;
  }
  return os.str();
}

std::string to_string(const TransitionEnv& d) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [a, s] : d.entries()) {
    os << (first ? "" : ", ") << a << " @ " << s;
    first = false;
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Type& t) { return os << to_string(t); }
std::ostream& operator<<(std::ostream& os, const Term& t) { return os << to_string(t); }

}  // namespace stagecraft
