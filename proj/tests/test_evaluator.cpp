#include <doctest.h>

#include <chrono>

#include "corpus.hpp"
#include "stagecraft/evaluator.hpp"

using namespace stagecraft;

namespace {
EvalResult run(const std::string& src, std::size_t fuel = 100000) { return eval({}, parse_term(src), fuel); }
}  // namespace

TEST_CASE("power corpus evaluates to the expected code and numbers") {
  auto start = std::chrono::steady_clock::now();
  EvalResult r = eval({}, corpus_term("power_alpha3.mt"), 100000);
  REQUIRE(r.is_value());
  CHECK(to_string(*r.value) == "next[a] (\\x:int. x * (x * (x * 1)))");
  EvalResult n = eval({}, corpus_term("power_forall_run.mt"), 100000);
  REQUIRE(n.is_value());
  CHECK(*n.value == Term::int_lit(8));
  EvalResult p = eval({}, parse_term("(" + read_corpus("power0.mt") + ") 10 2"), 100000);
  REQUIRE(p.is_value());
  CHECK(*p.value == Term::int_lit(1024));
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
}

TEST_CASE("quote and instantiation interplay") {
  CHECK(*run("(gen a. next[a] (1 + 2)) @[]").value == Term::int_lit(3));
  CHECK(to_string(*run("(gen a. next[a] (1 + 2)) @[b c]").value) == "next[b] (next[c] (1 + 2))");
  CHECK(*run("(\\x:<a>int. next[a] (prev[a] x + 1)) (next[a] 2)").value == parse_term("next[a] (2 + 1)"));
}

TEST_CASE("M1 converges and M2 diverges") {
  EvalResult m1 = eval({}, corpus_term("m1.mt"), 10000);
  REQUIRE(m1.is_value());
  CHECK(*m1.value == Term::int_lit(1));
  EvalResult m2 = eval({}, corpus_term("m2.mt"), 100000);
  CHECK(m2.is_fuel_exhausted());
}

TEST_CASE("error generation and propagation") {
  CHECK(run("1 + true").is_err());
  CHECK(run("true + (fix f:int -> int. f) 1").is_err());
  CHECK(run("if 1 then 2 else 3").is_err());
  CHECK(run("1 2").is_err());
  // a non-function head is an error even when the argument diverges
  CHECK(run("1 ((fix f:int -> int. f) 0)").is_err());
  CHECK(run("1 @[a]").is_err());
  CHECK(run("x").is_err());
  CHECK(run("prev[a] 1").is_err());
  CHECK(eval(parse_transition("a"), parse_term("prev[a] 1"), 100).is_err());
  CHECK(eval(parse_transition("a"), parse_term("prev[b] x"), 100).is_err());
  CHECK(run("next[a] (prev[a] (1 + true))").is_err());
}

TEST_CASE("fuel counts rule applications") {
  EvalResult r = run("1 + 2", 3);
  CHECK(r.is_value());
  CHECK(r.steps == 3);
  CHECK(run("1 + 2", 2).is_fuel_exhausted());
}

TEST_CASE("values evaluate to themselves") {
  for (const char* v : {"1", "\\x:int. x", "next[a] (x + next[b] y)", "gen a. next[a] (\\x:int. x)",
                        "next[a] (next[b] (prev[b] z))"}) {
    Term t = parse_term(v);
    CHECK(is_value({}, t));
    EvalResult r = eval({}, t, 1000);
    REQUIRE(r.is_value());
    CHECK(*r.value == t);
  }
  CHECK_FALSE(is_value({}, parse_term("next[a] (prev[a] x)")));
  CHECK_FALSE(is_value({}, parse_term("1 + 2")));
  CHECK(is_value(parse_transition("a"), parse_term("1 + 2")));
}
