#include <doctest.h>

#include "corpus.hpp"
#include "stagecraft/typing.hpp"

using namespace stagecraft;

namespace {

TypeErrorKind error_of(const TypingContext& g, const Transition& a, const std::string& src) {
  try {
    typecheck(g, a, parse_term(src));
  } catch (const TypeError& e) {
    return e.kind;
  }
  FAIL("expected a type error for " << src);
  return TypeErrorKind::UnboundVariable;
}

Transition stage(const char* s) { return parse_transition(s); }

}  // namespace

TEST_CASE("quoting a variable declared one stage up") {
  auto g = parse_context("x : b @ [a]");
  CHECK(typecheck(g, {}, parse_term("next[a] x")) == parse_type("<a>b"));
  CHECK(error_of(parse_context("x : b @ []"), {}, "next[a] x") == TypeErrorKind::VarStageMismatch);
}

TEST_CASE("gen binder is renamed away from the context") {
  // The bound variable is distinct from the free one in the context.
  auto g = parse_context("x : <a>b @ []");
  Type t = typecheck(g, {}, parse_term("gen a. x"));
  CHECK(t == parse_type("forall c. <a>b"));
}

TEST_CASE("gen escape") {
  auto g = parse_context("y : b @ [a]");
  CHECK(error_of(g, {}, "gen a. next[a] y") == TypeErrorKind::GenEscape);
  CHECK(error_of({}, {}, "\\y:b. gen a. next[a] y") == TypeErrorKind::GenEscape);
  CHECK(typecheck(g, {}, parse_term("gen c. next[a] y")) == parse_type("forall c. <a>b"));
}

TEST_CASE("each typing error is reported with its position") {
  TypingContext g = parse_context("f : int -> int @ [], n : int @ [], p : bool @ [], q : <a>int @ []");
  CHECK(error_of(g, {}, "z") == TypeErrorKind::UnboundVariable);
  CHECK(error_of(g, {}, "n 1") == TypeErrorKind::NotAFunction);
  CHECK(error_of(g, {}, "f true") == TypeErrorKind::ArgumentMismatch);
  CHECK(error_of(g, stage("a"), "prev[a] n") == TypeErrorKind::NotCode);
  CHECK(error_of(g, {}, "prev[a] q") == TypeErrorKind::PrevStageMismatch);
  CHECK(error_of(g, {}, "n @[a]") == TypeErrorKind::NotForall);
  CHECK(error_of(g, {}, "if n then 1 else 2") == TypeErrorKind::ConditionNotBool);
  CHECK(error_of(g, {}, "if p then 1 else true") == TypeErrorKind::BranchMismatch);
  CHECK(error_of(g, {}, "n + p") == TypeErrorKind::ArithNotInt);
  CHECK(error_of(g, {}, "fix h:int. 1") == TypeErrorKind::FixAnnotationNotArrow);
  CHECK(error_of(g, {}, "fix h:int -> int. 1") == TypeErrorKind::FixBodyMismatch);
  try {
    typecheck(g, {}, parse_term("\\x:int. f (x + p)"));
  } catch (const TypeError& e) {
    CHECK(e.position == Position{0, 1});
  }
}

TEST_CASE("power corpus typechecks at the stated types") {
  CHECK(typecheck({}, {}, corpus_term("power0.mt")) == parse_type("int -> int -> int"));
  CHECK(typecheck({}, {}, corpus_term("power1.mt")) == parse_type("int -> <a>int -> <a>int"));
  CHECK(typecheck({}, {}, corpus_term("power_alpha.mt")) == parse_type("int -> <a>(int -> int)"));
  CHECK(typecheck({}, {}, corpus_term("power2.mt")) == parse_type("forall b. int -> <b>int -> <b>int"));
  CHECK(typecheck({}, {}, corpus_term("power_forall.mt")) == parse_type("int -> forall c. <c>(int -> int)"));
  CHECK(typecheck({}, {}, corpus_term("power_forall_run.mt")) == parse_type("int"));
  CHECK(typecheck({}, {}, corpus_term("m1.mt")) == parse_type("int"));
  CHECK(typecheck({}, {}, corpus_term("m2.mt")) == parse_type("int"));
}

TEST_CASE("instantiation substitutes the sequence") {
  auto g = parse_context("m : forall a. <a>int -> <a>int @ []");
  CHECK(typecheck(g, {}, parse_term("m @[b c]")) == parse_type("<b><c>int -> <b><c>int"));
  CHECK(typecheck(g, {}, parse_term("m @[]")) == parse_type("int -> int"));
  CHECK(typecheck(g, {}, parse_term("m @! b")) == parse_type("<b>int -> <b>int"));
}

TEST_CASE("typing is invariant under renaming of binders") {
  Term a = parse_term("\\f:int -> <a>int. gen c. next[c] (\\y:int. prev[c] (next[c] y))");
  Term b = parse_term("\\g:int -> <a>int. gen d. next[d] (\\z:int. prev[d] (next[d] z))");
  CHECK(typecheck({}, {}, a) == typecheck({}, {}, b));
}
