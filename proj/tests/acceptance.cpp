// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "stagecraft/evaluator.hpp"
#include "stagecraft/harness.hpp"
#include "stagecraft/logic.hpp"
#include "stagecraft/staged.hpp"
#include "stagecraft/syntax.hpp"
#include "stagecraft/typing.hpp"

using namespace stagecraft;

namespace {

// Pinned thresholds.
constexpr std::uint64_t kSeed = 20240601;
constexpr double kPowerSeconds = 1.0;
constexpr double kSubjectReductionSeconds = 30.0;
constexpr std::size_t kReductionCases = 1000;
constexpr std::size_t kSoundnessCases = 1000;
constexpr std::size_t kErasureCases = 500;
constexpr std::size_t kMinDerivations = 30;
constexpr std::size_t kModelCases = 60;
constexpr std::size_t kEmbeddingCases = 120;
constexpr std::size_t kM1Fuel = 10000;
constexpr std::size_t kM2Fuel = 100000;

const std::string kCorpus = STAGECRAFT_CORPUS_DIR;

std::string read(const std::string& name) {
  std::ifstream in(kCorpus + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Term term(const std::string& name) { return parse_term(read(name)); }

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool c, const std::string& what) {
    if (!c && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome suite(const std::string& name, std::size_t cases, double limit = 0) {
  Outcome o;
  auto rep = harness::run_suite(name, kSeed, cases, {kCorpus, true});
  std::ostringstream os;
  os << rep.cases << " cases, " << rep.checks << " checks, " << rep.violations << " violations, " << rep.skipped
     << " skipped, " << rep.seconds << " s";
  o.detail = os.str();
  if (rep.violations) o.ok = false;
  if (rep.skipped) o.ok = false;
  if (limit > 0 && rep.seconds >= limit) o.ok = false;
  if (!rep.failures.empty()) o.detail += "; first failure: " + rep.failures.front();
  return o;
}

Outcome power_corpus() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  const std::pair<const char*, const char*> stated[] = {
      {"power0.mt", "int -> int -> int"},
      {"power1.mt", "int -> <a>int -> <a>int"},
      {"power_alpha.mt", "int -> <a>(int -> int)"},
      {"power2.mt", "forall b. int -> <b>int -> <b>int"},
      {"power_forall.mt", "int -> forall c. <c>(int -> int)"},
  };
  for (const auto& [file, type] : stated) {
    auto t = try_typecheck({}, {}, term(file));
    o.require(t && *t == parse_type(type), std::string(file) + " does not have type " + type);
  }
  auto code = eval({}, term("power_alpha3.mt"), kM1Fuel);
  o.require(code.is_value() && to_string(*code.value) == "next[a] (\\x:int. x * (x * (x * 1)))",
            "power_alpha 3 evaluates to " + describe(code));
  auto eight = eval({}, term("power_forall_run.mt"), kM1Fuel);
  o.require(eight.is_value() && *eight.value == Term::int_lit(8), "power_forall 3 @[] 2 gives " + describe(eight));
  // erasure only applies to staged-typed terms, where power2 is instantiated by a single variable
  Term staged = term("power_forall_staged.mt");
  o.require(try_staged_typecheck({}, {}, {}, staged) == Type::integer(), "staged power run is not staged-typed");
  auto annotated = eval({}, staged, kM1Fuel);
  o.require(annotated.is_value() && *annotated.value == Term::int_lit(8), "staged run gives " + describe(annotated));
  auto erased = erased_eval(0, erase(staged), kM1Fuel);
  o.require(erased.is_value() && to_string(*erased.value) == "8", "erased staged run gives " + describe(erased));
  double s = seconds_since(t0);
  o.require(s < kPowerSeconds, "took " + std::to_string(s) + " s");
  if (o.ok) o.detail = "five stated types, code value and 8 under both evaluators, " + std::to_string(s) + " s";
  return o;
}

Outcome erasure_discriminator() {
  Outcome o;
  Term m1 = term("m1.mt");
  auto a = eval({}, m1, kM1Fuel);
  o.require(a.is_value() && *a.value == Term::int_lit(1), "M1 evaluates to " + describe(a));
  auto b = erased_eval(0, erase(m1), kM1Fuel);
  o.require(b.is_value() && to_string(*b.value) == "1", "erased M1 evaluates to " + describe(b));
  auto c = eval({}, term("m2.mt"), kM2Fuel);
  o.require(c.is_fuel_exhausted(), "M2 gives " + describe(c));
  if (o.ok) o.detail = "M1 = 1 under both evaluators, M2 exhausts " + std::to_string(kM2Fuel) + " fuel";
  return o;
}

Outcome logic_soundness() {
  std::set<std::string> rules;
  std::size_t count = 0, any_stage_only = 0;
  std::function<void(const Derivation&)> collect = [&](const Derivation& d) {
    rules.insert(d.rule);
    for (const auto& p : d.premises) collect(p);
  };
  Outcome o;
  for (const auto& e : std::filesystem::directory_iterator(kCorpus + "/proofs")) {
    if (e.path().extension() != ".prf") continue;
    std::ifstream in(e.path());
    std::ostringstream ss;
    ss << in.rdbuf();
    Derivation d = parse_derivation(ss.str());
    collect(d);
    ++count;
    try {
      check_derivation(d, ClassicalMode::SameStage);
    } catch (const DerivationError&) {
      ++any_stage_only;
    }
  }
  o.require(count >= kMinDerivations, "only " + std::to_string(count) + " derivations");
  for (const char* r : {"CodeI", "CodeE", "ForallI", "ForallE", "BotE", "BotE-Alt"})
    o.require(rules.count(r) == 1, std::string("no derivation uses ") + r);
  o.require(any_stage_only > 0, "no derivation separates the two bottom rules");
  if (!o.ok) return o;
  Outcome s = suite("logic-soundness", kModelCases);
  s.detail = std::to_string(count) + " derivations (" + std::to_string(any_stage_only) + " any-stage only); " + s.detail;
  return s;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"power corpus", power_corpus},
      {"erasure discriminator", erasure_discriminator},
      {"subject reduction", [] { return suite("subject-reduction", kReductionCases, kSubjectReductionSeconds); }},
      {"confluence", [] { return suite("confluence", kReductionCases); }},
      {"strong normalization", [] { return suite("normalization", kReductionCases); }},
      {"time-ordered normalization", [] { return suite("time-ordered", kReductionCases); }},
      {"type soundness", [] { return suite("type-soundness", kSoundnessCases); }},
      {"erasure property", [] { return suite("erasure", kErasureCases); }},
      {"logic soundness", logic_soundness},
      {"embedding correctness", [] { return suite("embeddings", kEmbeddingCases); }},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::cout << (o.ok ? "PASS" : "FAIL") << " " << n << " " << name << ": " << o.detail << std::endl;
    failed += o.ok ? 0 : 1;
  }
  return failed ? 1 : 0;
}
