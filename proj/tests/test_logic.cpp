#include <doctest.h>

#include <filesystem>
#include <random>

#include "corpus.hpp"
#include "stagecraft/logic.hpp"
#include "stagecraft/syntax.hpp"

using namespace stagecraft;

namespace {

Prop P(const char* s) { return parse_type(s); }
Transition T(const char* s) { return parse_transition(s); }

Derivation proof(const std::string& name) { return parse_derivation(read_corpus("proofs/" + name + ".prf")); }

DerivationErrorKind rejection(const Derivation& d, ClassicalMode mode) {
  try {
    check_derivation(d, mode);
  } catch (const DerivationError& e) {
    return e.kind;
  }
  FAIL("derivation was accepted");
  return DerivationErrorKind::RuleMismatch;
}

KripkeModel model(const char* json) { return parse_model(json); }

std::vector<std::string> proof_names() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(std::string(STAGECRAFT_CORPUS_DIR) + "/proofs"))
    out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

const std::set<std::string> kAnyStageOnly = {"code_bot_elim", "self_duality", "bot_transfer", "code_not_not"};

}  // namespace

TEST_CASE("derivation checking examples") {
  LogicJudgment id = check_derivation(proof("identity"), ClassicalMode::AnyStage);
  CHECK(id.context.empty());
  CHECK(id.stage.empty());
  CHECK(id.prop == P("b -> b"));

  LogicJudgment ci = check_derivation(proof("code_intro"), ClassicalMode::AnyStage);
  CHECK(ci.context == std::vector<Assumption>{{P("p"), T("a")}});
  CHECK(ci.prop == P("<a>p"));

  LogicJudgment dn = check_derivation(proof("double_negation"), ClassicalMode::AnyStage);
  CHECK(dn.prop == P("((p -> bot) -> bot) -> p"));
  CHECK(dn.context.empty());
}

TEST_CASE("the two classical rules are separated by forall a. <a>bot -> bot") {
  Derivation d = proof("code_bot_elim");
  CHECK(check_derivation(d, ClassicalMode::AnyStage).prop == P("forall a. <a>bot -> bot"));
  CHECK(rejection(d, ClassicalMode::SameStage) == DerivationErrorKind::SideConditionFailure);
}

TEST_CASE("self-duality of the modality holds only with the unrestricted rule") {
  Derivation d = proof("self_duality");
  CHECK(check_derivation(d, ClassicalMode::AnyStage).prop == P("(<a>(p -> bot) -> bot) -> <a>p"));
  CHECK(rejection(d, ClassicalMode::SameStage) == DerivationErrorKind::SideConditionFailure);
}

TEST_CASE("BotE-Alt requires equal stages in both modes") {
  Derivation d = proof("code_bot_elim");
  d.premises[0].premises[0].rule = "BotE-Alt";
  CHECK(rejection(d, ClassicalMode::AnyStage) == DerivationErrorKind::SideConditionFailure);
  CHECK(check_derivation(proof("double_negation_same_stage"), ClassicalMode::SameStage).prop ==
        P("((p -> bot) -> bot) -> p"));
}

TEST_CASE("malformed derivations are rejected with the right error") {
  // forall-introduction over a variable free in the context
  Derivation bad_forall = parse_derivation(R"({"rule":"ForallI","var":"a","premises":[{"rule":"Hyp","prop":"<a>p","stage":""}]})");
  CHECK(rejection(bad_forall, ClassicalMode::AnyStage) == DerivationErrorKind::SideConditionFailure);
  // ... or in the stage
  Derivation bad_stage = parse_derivation(R"({"rule":"ForallI","var":"a","premises":[{"rule":"Hyp","prop":"p","stage":"a"}]})");
  CHECK(rejection(bad_stage, ClassicalMode::AnyStage) == DerivationErrorKind::SideConditionFailure);
  // code-introduction when the stage does not end with the variable
  Derivation bad_code = parse_derivation(R"({"rule":"CodeI","var":"b","premises":[{"rule":"Hyp","prop":"p","stage":"a"}]})");
  CHECK(rejection(bad_code, ClassicalMode::AnyStage) == DerivationErrorKind::PremiseShapeError);
  // application across stages
  Derivation bad_app = parse_derivation(
      R"({"rule":"ArrowE","premises":[{"rule":"Hyp","prop":"p -> q","stage":"a"},{"rule":"Hyp","prop":"p","stage":""}]})");
  CHECK(rejection(bad_app, ClassicalMode::AnyStage) == DerivationErrorKind::PremiseShapeError);
  Derivation unknown = parse_derivation(R"({"rule":"Cut","premises":[]})");
  CHECK(rejection(unknown, ClassicalMode::AnyStage) == DerivationErrorKind::RuleMismatch);
  Derivation arity = parse_derivation(R"({"rule":"ArrowE","premises":[{"rule":"Hyp","prop":"p","stage":""}]})");
  CHECK(rejection(arity, ClassicalMode::AnyStage) == DerivationErrorKind::PremiseShapeError);
  // stated conclusion disagreeing with the rule
  Derivation wrong = proof("identity");
  wrong.conclusion->prop = P("b -> c");
  CHECK(rejection(wrong, ClassicalMode::AnyStage) == DerivationErrorKind::RuleMismatch);
  Derivation narrow = proof("weakened_hypothesis");
  narrow.conclusion->context.clear();
  CHECK(rejection(narrow, ClassicalMode::AnyStage) == DerivationErrorKind::RuleMismatch);
}

TEST_CASE("error paths point at the failing node") {
  Derivation d = proof("self_duality");
  try {
    check_derivation(d, ClassicalMode::SameStage);
    FAIL("accepted");
  } catch (const DerivationError& e) {
    CHECK(e.path == std::vector<std::size_t>{0, 0});
  }
}

TEST_CASE("derivation json round-trips") {
  for (const auto& name : proof_names()) {
    Derivation d = proof(name);
    Derivation again = parse_derivation(derivation_to_json(d));
    CHECK(derivation_to_json(again) == derivation_to_json(d));
    CHECK(check_derivation(again, ClassicalMode::AnyStage).prop == check_derivation(d, ClassicalMode::AnyStage).prop);
  }
}

TEST_CASE("transition monoid examples") {
  CHECK(transition_monoid(model(R"({"states":["s"],"labels":["a"],"transitions":{"a":["s"]}})")).size() == 1);
  auto swap = transition_monoid(model(R"({"states":["s","t"],"labels":["a"],"transitions":{"a":["t","s"]}})"));
  CHECK(swap == std::vector<StateFn>{{0, 1}, {1, 0}});
  auto partial = transition_monoid(model(R"({"mode":"partial","states":["s"],"labels":["a"],"transitions":{"a":[null]}})"));
  CHECK(partial == std::vector<StateFn>{{0}, {-1}});
  KripkeModel big = random_model(4, 3, true, 5);
  CHECK(transition_monoid(big).size() <= 625);
}

TEST_CASE("satisfaction examples") {
  KripkeModel one = model(R"({"states":["s"],"labels":["a"],"transitions":{"a":["s"]},"valuation":{"p":["s"]}})");
  CHECK(satisfies(one, {}, 0, P("forall a. <a>p")));
  KripkeModel m = random_model(3, 2, false, 11);
  auto monoid = transition_monoid(m);
  for (const auto& g : monoid)
    for (std::size_t s = 0; s < 3; ++s) {
      CHECK(satisfies(m, {{"a", g}}, s, P("<a>(p -> p)")));
      CHECK_FALSE(satisfies(m, {{"a", g}}, s, P("<a>bot")));
    }
  KripkeModel partial = model(R"({"mode":"partial","states":["s"],"labels":["a"],"transitions":{"a":[null]}})");
  CHECK(satisfies(partial, {{"a", {-1}}}, 0, P("<a>bot")));
  CHECK_THROWS_AS(satisfies(m, {}, 0, P("<b>p")), UnboundTransitionVar);
}

TEST_CASE("local consequence examples") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    KripkeModel m = random_model(1 + seed % 4, 1 + seed % 3, seed % 2 == 1, seed);
    CHECK(holds_locally(m, {{P("p"), T("a")}}, P("<a>p")));
  }
  KripkeModel zero = model(R"({"states":["s","t"],"labels":["a"],"transitions":{"a":["t","s"]}})");
  CHECK_FALSE(holds_locally(zero, {}, P("p")));
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    CHECK(holds_locally(random_model(1 + seed % 3, 2, false, seed), {}, P("<a>bot -> <b>bot")));
  KripkeModel counter =
      model(R"({"mode":"partial","states":["s"],"labels":["a","b"],"transitions":{"a":[null],"b":["s"]}})");
  CHECK_FALSE(holds_locally(counter, {}, P("<a>bot -> <b>bot")));
}

TEST_CASE("random models are deterministic and shaped") {
  CHECK(model_to_json(random_model(3, 2, true, 7)) == model_to_json(random_model(3, 2, true, 7)));
  CHECK(model_to_json(random_model(3, 2, true, 7)) != model_to_json(random_model(3, 2, true, 8)));
  KripkeModel m = random_model(1, 1, false, 0);
  CHECK(m.transitions == std::vector<std::vector<int>>{{0}});
  KripkeModel p = random_model(3, 2, true, 7);
  CHECK(p.partial);
  for (const auto& row : p.transitions) CHECK(row.size() == 3);
  KripkeModel again = parse_model(model_to_json(p));
  CHECK(model_to_json(again) == model_to_json(p));
}

TEST_CASE("model parsing rejects malformed input") {
  CHECK_THROWS_AS(parse_model(R"({"states":[],"labels":[]})"), ParseError);
  CHECK_THROWS_AS(parse_model(R"({"states":["s"],"labels":["a"],"transitions":{"a":[null]}})"), ParseError);
  CHECK_THROWS_AS(parse_model(R"({"states":["s"],"labels":["a"],"transitions":{"a":["t"]}})"), ParseError);
  CHECK_THROWS_AS(parse_model("{"), ParseError);
}

TEST_CASE("parallel and serial local consequence agree") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    KripkeModel m = random_model(1 + seed % 4, 1 + seed % 3, seed % 2 == 0, seed);
    Prop phi = random_prop(seed, 6, {"a", "b"}, 1);
    Prop hyp = random_prop(seed + 1000, 3, {"a"}, 0);
    std::vector<Assumption> ctx{{hyp, T("b")}};
    CHECK(holds_locally(m, ctx, phi) == holds_locally_serial(m, ctx, phi));
  }
}

TEST_CASE("monoid quantification agrees with quantification over label sequences") {
  std::mt19937_64 rng(3);
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    std::size_t states = 1 + seed % 2;
    bool partial = seed % 3 == 0;
    KripkeModel m = random_model(states, 2, partial, seed);
    std::size_t bound = partial ? 8 : 3;  // covers every monoid element
    Prop phi = random_prop(seed * 7 + 1, 7, {"a"}, 2);
    std::vector<std::size_t> seq(rng() % 4);
    for (auto& l : seq) l = rng() % 2;
    StateFn f(states);
    for (std::size_t s = 0; s < states; ++s) {
      int t = static_cast<int>(s);
      for (std::size_t l : seq) t = t < 0 ? -1 : m.transitions[l][static_cast<std::size_t>(t)];
      f[s] = t;
    }
    for (std::size_t s = 0; s < states; ++s) {
      CHECK(satisfies(m, {{"a", f}}, s, phi) == satisfies_by_sequences(m, {{"a", seq}}, s, phi, bound));
      ++checked;
    }
  }
  CHECK(checked >= 60);
}

TEST_CASE("curated derivations are sound on random models") {
  auto names = proof_names();
  CHECK(names.size() >= 30);
  for (const auto& name : names) {
    Derivation d = proof(name);
    LogicJudgment j = check_derivation(d, ClassicalMode::AnyStage);
    bool same_stage = true;
    try {
      check_derivation(d, ClassicalMode::SameStage);
    } catch (const DerivationError&) {
      same_stage = false;
    }
    CHECK_MESSAGE(same_stage == !kAnyStageOnly.count(name), name);
    Prop goal = Type::code(j.stage, j.prop);
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
      KripkeModel total = random_model(1 + seed % 4, 1 + seed % 3, false, seed);
      CHECK_MESSAGE(holds_locally(total, j.context, goal), name);
      if (same_stage) CHECK_MESSAGE(holds_locally(random_model(1 + seed % 4, 1 + seed % 3, true, seed), j.context, goal), name);
    }
  }
}

// self_duality is absent: its conclusion is still valid on partial models, the
// converse direction (code_not_not) is the one partial models refute.
TEST_CASE("conclusions needing the unrestricted rule fail on some partial model") {
  for (const char* name : {"code_bot_elim", "bot_transfer", "code_not_not"}) {
    LogicJudgment j = check_derivation(proof(name), ClassicalMode::AnyStage);
    Prop goal = Type::code(j.stage, j.prop);
    bool refuted = false;
    for (std::uint64_t seed = 0; seed < 50 && !refuted; ++seed)
      refuted = !holds_locally(random_model(1 + seed % 3, 1 + seed % 2, true, seed), j.context, goal);
    CHECK_MESSAGE(refuted, name);
  }
}
