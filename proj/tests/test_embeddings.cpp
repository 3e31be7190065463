#include <doctest.h>

#include <algorithm>

#include "stagecraft/embeddings.hpp"
#include "stagecraft/evaluator.hpp"
#include "stagecraft/reduction.hpp"
#include "stagecraft/syntax.hpp"
#include "stagecraft/typing.hpp"

using namespace stagecraft;

namespace {

const TransitionVar kA = TransitionVar::free("a");

SourceTerm circle(const char* s) { return parse_source_term(Dialect::Circle, s); }
SourceTerm boxed(const char* s) { return parse_source_term(Dialect::Box, s); }
SourceTerm lam_i(const char* s) { return parse_source_term(Dialect::LambdaI, s); }

EmbedErrorKind embed_failure(const std::function<void()>& f) {
  try {
    f();
  } catch (const EmbedError& e) {
    return e.kind;
  }
  FAIL("no embedding error");
  return EmbedErrorKind::CSPPresent;
}

// Distinct results as a sorted list of printed terms.
std::vector<std::string> distinct(const std::vector<Term>& ts) {
  std::vector<Term> uniq;
  for (const auto& t : ts)
    if (std::find(uniq.begin(), uniq.end(), t) == uniq.end()) uniq.push_back(t);
  std::vector<std::string> out;
  for (const auto& t : uniq) out.push_back(to_string(t));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("circle embedding examples") {
  SourceTerm m = circle("next (\\x:b. x)");
  CHECK(circle_typecheck({}, 0, m) == parse_source_type(Dialect::Circle, "circle (b -> b)"));
  Term image = embed_circle(m, kA);
  CHECK(image == parse_term("next[a] (\\x:b. x)"));
  CHECK(typecheck({}, {}, image) == parse_type("<a>(b -> b)"));

  TypingContext g = embed_circle(CircleContext{{"x", SourceType::base("b"), 2}}, kA);
  CHECK(g.lookup("x")->stage == parse_transition("a a"));

  SourceTerm pn = circle("prev (next x)");
  CHECK(circle_reducts(pn).size() == 1);
  CHECK(redexes(embed_circle(pn, kA)).size() == 1);
  CHECK(circle_reducts(circle("next x")).empty());
  CHECK(redexes(embed_circle(circle("next x"), kA)).empty());
}

TEST_CASE("forgetting annotations") {
  CHECK(forget_to_circle(parse_term("next[a] (\\x:b. x)")) == circle("next (\\x:b. x)"));
  CHECK(embed_failure([] { forget_to_circle(parse_term("gen a. x")); }) == EmbedErrorKind::NotQuantifierFree);
  CHECK(embed_failure([] { forget_to_circle(parse_term("x @[]")); }) == EmbedErrorKind::NotQuantifierFree);
  CHECK(embed_failure([] { forget_to_circle(parse_term("\\x:forall a. <a>b. x")); }) ==
        EmbedErrorKind::NotQuantifierFree);
}

TEST_CASE("box embedding examples") {
  SourceTerm m = boxed("box (\\x:b. x)");
  Term image = embed_box(m, {});
  CHECK(image == parse_term("gen a. next[a] (\\x:b. x)"));
  CHECK(typecheck({}, {}, image) == parse_type("forall a. <a>(b -> b)"));
  CHECK(embed_box(boxed("unbox[1] u"), parse_transition("a")) == parse_term("prev[a] (u @[a])"));
  CHECK(embed_box(boxed("unbox[0] u"), {}) == parse_term("u @[]"));
  CHECK(embed_failure([] { embed_box(boxed("unbox[2] u"), parse_transition("a")); }) ==
        EmbedErrorKind::StackTooShallow);
  // box nested under a stage picks a binder distinct from the stage
  Term nested = embed_box(boxed("box (unbox[1] k)"), parse_transition("a"));
  CHECK(nested == parse_term("gen c. next[c] (prev[c] (k @[c]))"));
}

TEST_CASE("classifier calculus embedding examples") {
  SourceTerm run = lam_i("run (close[a] (bracket[a] 1))");
  CHECK(lambda_i_typecheck({}, {}, run) == SourceType::integer());
  Term image = embed_lambda_i(run);
  CHECK(image == parse_term("(gen a. next[a] 1) @[]"));
  CHECK(typecheck({}, {}, image) == Type::integer());

  SourceTerm open = lam_i("open[c] (close[a] (bracket[a] 1))");
  CHECK(embed_lambda_i(open) == parse_term("(gen a. next[a] 1) @[c]"));
  CHECK(typecheck({}, {}, embed_lambda_i(open)) == parse_type("<c>int"));
  CHECK(lambda_i_typecheck({}, {}, open) == parse_source_type(Dialect::LambdaI, "<int>@c"));

  CHECK(embed_failure([] { embed_lambda_i(lam_i("bracket[a] (%x)")); }) == EmbedErrorKind::CSPPresent);
  CHECK(embed_failure([] { embed_lambda_i(lam_i("\\x. x")); }) == EmbedErrorKind::MissingAnnotation);
  CHECK(embed_failure([] { embed_lambda_i(lam_i("bracket 1")); }) == EmbedErrorKind::MissingAnnotation);
  // close must not capture a classifier that is still in use
  CHECK_THROWS_AS(lambda_i_typecheck({{"y", SourceType::integer(), {"a"}}}, {}, lam_i("close[a] (bracket[a] y)")),
                  SourceTypeError);
}

TEST_CASE("run and cross-stage persistence sugar") {
  Term m = parse_term("m");
  CHECK(desugar_run(m) == parse_term("m @[]"));
  CHECK(desugar_run(desugar_run(m)) == parse_term("(m @[]) @[]"));
  EvalResult r = eval({}, desugar_run(parse_term("gen a. next[a] 1")), 100);
  REQUIRE(r.is_value());
  CHECK(*r.value == Term::int_lit(1));

  Term csp = desugar_csp(m, kA);
  CHECK(csp == parse_term("gen b. prev[a] (m @[a b])"));
  TypingContext g;
  g.bind("m", parse_type("forall b. <b>int"), {});
  CHECK(typecheck(g, parse_transition("a"), csp) == parse_type("forall b. <b>int"));
  // binder named like the quoted variable: the printer renames it
  Term clash = desugar_csp(m, kA, "a");
  CHECK(clash == csp);
  CHECK(to_string(clash).find("prev[a]") != std::string::npos);
}

TEST_CASE("source syntax round-trips") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto c = random_circle_sample(seed, 20);
    CHECK(parse_source_term(Dialect::Circle, to_string(c.term)) == c.term);
    CHECK(parse_source_type(Dialect::Circle, to_string(c.type)) == c.type);
    auto b = random_box_sample(seed, 20);
    CHECK(parse_source_term(Dialect::Box, to_string(b.term)) == b.term);
    CHECK(parse_source_type(Dialect::Box, to_string(b.type)) == b.type);
    auto l = random_lambda_i_sample(seed, 20);
    CHECK(parse_source_term(Dialect::LambdaI, to_string(l.term)) == l.term);
    CHECK(parse_source_type(Dialect::LambdaI, to_string(l.type)) == l.type);
  }
}

TEST_CASE("embedded samples typecheck at the translated type") {
  std::size_t total_size = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto c = random_circle_sample(seed, 25);
    Transition stage(std::vector<TransitionVar>(c.level, kA));
    CHECK(typecheck(embed_circle(c.context, kA), stage, embed_circle(c.term, kA)) == embed_circle(c.type, kA));
    CHECK(forget_to_circle(embed_circle(c.term, kA)) == c.term);
    total_size += term_size(embed_circle(c.term, kA));

    auto b = random_box_sample(seed, 25);
    CHECK(typecheck(embed_box(b.context, b.stage), b.stage, embed_box(b.term, b.stage)) == embed_box(b.type));

    auto l = random_lambda_i_sample(seed, 25);
    CHECK(typecheck(embed_lambda_i(l.context), classifier_stage(l.stage), embed_lambda_i(l.term)) ==
          embed_lambda_i(l.type));
  }
  CHECK(total_size / 120 >= 8);
}

TEST_CASE("one-step reducts correspond under the circle embedding") {
  std::size_t with_redex = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto c = random_circle_sample(seed, 25);
    std::vector<Term> source;
    for (const auto& n : circle_reducts(c.term)) source.push_back(embed_circle(n, kA));
    std::vector<Term> target;
    for (const auto& s : redexes(embed_circle(c.term, kA))) target.push_back(s.result);
    CHECK(distinct(source) == distinct(target));
    for (const auto& t : target) CHECK(embed_circle(forget_to_circle(t), kA) == t);
    if (!source.empty()) ++with_redex;
  }
  CHECK(with_redex >= 60);
}

TEST_CASE("beta steps correspond under the box embedding") {
  std::size_t with_redex = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto b = random_box_sample(seed, 25);
    std::vector<Term> source;
    for (const auto& n : box_beta_reducts(b.term)) source.push_back(embed_box(n, b.stage));
    std::vector<Term> target;
    for (const auto& s : redexes(embed_box(b.term, b.stage)))
      if (s.rule == RedexRule::Beta) target.push_back(s.result);
    CHECK(distinct(source) == distinct(target));
    if (!source.empty()) ++with_redex;
  }
  CHECK(with_redex >= 60);
}
