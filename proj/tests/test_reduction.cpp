#include <doctest.h>

#include <random>

#include "stagecraft/generators.hpp"
#include "stagecraft/reduction.hpp"
#include "stagecraft/syntax.hpp"
#include "stagecraft/typing.hpp"

using namespace stagecraft;

namespace {

Path path_of(std::initializer_list<std::pair<const char*, bool>> letters) {
  Path p;
  for (auto [v, inv] : letters) p = p * Path::letter(TransitionVar::free(v), inv);
  return p;
}

std::vector<gen::Sample> corpus(std::size_t n, std::uint64_t seed) {
  gen::Config cfg;
  std::vector<gen::Sample> out;
  auto ctx = gen::pure_context(cfg);
  for (std::size_t i = 0; out.size() < n; ++i) {
    std::mt19937_64 rng(gen::case_seed(seed, i));
    Transition stage = (i % 3 == 2) ? parse_transition("a") : Transition{};
    if (auto s = gen::well_typed(rng, cfg, ctx, stage)) out.push_back(*s);
  }
  return out;
}

}  // namespace

TEST_CASE("annotated redexes") {
  auto r = redexes(parse_term("next[a] ((\\x:b. x) y)"));
  REQUIRE(r.size() == 1);
  CHECK(r[0].path == path_of({{"a", false}}));
  CHECK(r[0].result == parse_term("next[a] y"));

  r = redexes(parse_term("prev[a] (next[a] z)"));
  REQUIRE(r.size() == 1);
  CHECK(r[0].path == path_of({{"a", true}}));
  CHECK(r[0].rule == RedexRule::Quote);
  CHECK(r[0].result == parse_term("z"));

  r = redexes(parse_term("gen a. next[a] (prev[a] (next[a] z))"));
  REQUIRE(r.size() == 1);
  CHECK(r[0].path == Path{});
  CHECK(r[0].result == parse_term("gen a. next[a] z"));
}

TEST_CASE("leftmost-outermost step") {
  CHECK(step(parse_term("(\\x:b. x) y"))->result == parse_term("y"));
  CHECK(!step(parse_term("y")));
  auto s = step(parse_term("((\\x:b. x) y) ((\\x:b. x) z)"));
  CHECK(s->result == parse_term("y ((\\x:b. x) z)"));
  CHECK(s->path == Path{});
}

TEST_CASE("normalization examples") {
  auto r = normalize(parse_term("(gen a. next[a] y) @[b b]"), 100);
  REQUIRE(r.normal_form);
  CHECK(*r.normal_form == parse_term("next[b] (next[b] y)"));
  r = normalize(parse_term("prev[b] (prev[a] (next[a] (next[b] x)))"), 100);
  CHECK(*r.normal_form == parse_term("x"));
  CHECK(r.trace.size() == 2);
  r = normalize(parse_term("x"), 100);
  CHECK(r.trace.empty());
  // a non-terminating untyped term runs out of fuel
  auto omega = parse_term("(\\x:b. x x) (\\x:b. x x)");
  CHECK(!normalize(omega, 50).normal_form);
}

TEST_CASE("complete development") {
  CHECK(complete_development(parse_term("(\\x:b. x) y")) == parse_term("y"));
  CHECK(complete_development(parse_term("prev[b] (prev[a] (next[a] (next[b] x)))")) == parse_term("x"));
  CHECK(complete_development(parse_term("prev[a] (x y)")) == parse_term("prev[a] (x y)"));
  // the outer pair cannot cancel before the inner one has
  CHECK(complete_development(parse_term("prev[a] (prev[b] (next[a] (next[b] x)))")) ==
        parse_term("prev[a] (prev[b] (next[a] (next[b] x)))"));
}

TEST_CASE("parallel reduction") {
  Term m = parse_term("prev[b] (prev[a] (next[a] (next[b] x)))");
  CHECK(parallel_reduce_check(m, m));
  CHECK(parallel_reduce_check(m, parse_term("x")));
  CHECK(parallel_reduce_check(m, parse_term("prev[b] (next[b] x)")));
  CHECK(!parallel_reduce_check(parse_term("x"), parse_term("y")));
  Term n = parse_term("(\\x:b. x) ((\\y:b. y) z)");
  CHECK(parallel_reduce_check(n, parse_term("z")));
  CHECK(parallel_reduce_check(n, parse_term("(\\y:b. y) z")));
  CHECK(parallel_reduce_check(n, parse_term("(\\x:b. x) z")));
  auto all = parallel_reducts(n);
  // (\y:b. y) z and (\x:b. x) z coincide up to renaming
  CHECK(all.size() == 3);
  for (const auto& r : all) CHECK(parallel_reduce_check(n, r));
}

TEST_CASE("T-normality") {
  std::set<std::string> none;
  Term m = parse_term("next[a] ((\\x:b. x) y)");
  CHECK(is_T_normal(none, Path{}, parse_term("x")));
  CHECK(!is_T_normal(none, Path{}, parse_term("(\\x:b. x) y")));
  CHECK(is_T_normal(none, Path{}, m));
  CHECK(!is_T_normal(none, path_of({{"a", false}}), m));
  CHECK(is_T_normal_direct(none, Path{}, m));
  CHECK(!is_T_normal_direct(none, path_of({{"a", false}}), m));
  // quote redexes live at the inverse path and so are below epsilon
  Term q = parse_term("prev[a] (next[a] ((\\x:b. x) y))");
  CHECK(!is_T_normal(none, path_of({{"a", true}}), q));
  CHECK(!is_T_normal(none, Path{}, q));
  // a variable in Delta is collapsed to epsilon
  CHECK(!is_T_normal({"a"}, Path{}, m));
}

TEST_CASE("time-ordered sequence") {
  auto r = time_ordered_sequence(parse_term("prev[a] (next[a] ((\\x:b. x) y))"), 100);
  REQUIRE(r.trace.size() == 2);
  CHECK(r.trace[0].path == path_of({{"a", true}}));
  CHECK(r.trace[1].path == Path{});
  CHECK(*r.normal_form == parse_term("y"));
  r = time_ordered_sequence(parse_term("(\\x:b. x) ((\\y:b. y) z)"), 100);
  REQUIRE(r.trace.size() == 2);
  CHECK(r.trace[0].path == Path{});
  CHECK(r.trace[1].path == Path{});
}

TEST_CASE("generated terms typecheck and respect reduction properties") {
  auto samples = corpus(150, 17);
  for (const auto& s : samples) {
    CAPTURE(to_string(s.term));
    CHECK(term_size(s.term) <= 30);
    for (const auto& r : redexes(s.term)) {
      // subject reduction
      auto t = try_typecheck(s.context, s.stage, r.result);
      CHECK((t && *t == s.type));
      // annotation positivity
      CHECK(path_leq(Path{}, Path(s.stage) * r.path));
    }
    // step agrees with redexes
    if (auto st = step(s.term)) CHECK(st->result == redexes(s.term).front().result);
    // the inductive characterization agrees with the direct one
    for (const Path& t : {Path{}, path_of({{"a", false}}), path_of({{"a", true}}), path_of({{"b", false}})})
      CHECK(is_T_normal({}, t, s.term) == is_T_normal_direct({}, t, s.term));
    // diamond through the complete development
    Term star = complete_development(s.term);
    CHECK(parallel_reduce_check(s.term, star));
    auto reducts = parallel_reducts(s.term);
    for (const auto& n : reducts) CHECK(parallel_reduce_check(n, star));
    // normal forms agree between strategies
    auto a = normalize(s.term, 10000);
    auto b = time_ordered_sequence(s.term, 10000);
    REQUIRE(a.normal_form);
    REQUIRE(b.normal_form);
    CHECK(*a.normal_form == *b.normal_form);
  }
}
