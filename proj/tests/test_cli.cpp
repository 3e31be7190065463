#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "corpus.hpp"
#include "stagecraft/cli.hpp"
#include "stagecraft/generators.hpp"
#include "stagecraft/harness.hpp"
#include "stagecraft/syntax.hpp"

using namespace stagecraft;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corpus_path(const std::string& name) { return std::string(STAGECRAFT_CORPUS_DIR) + "/" + name; }

std::string scratch(const std::string& name, const std::string& content) {
  auto dir = std::filesystem::temp_directory_path() / "stagecraft_cli_tests";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::ofstream(p) << content;
  return p.string();
}

const char* kModel = R"({"mode": "total", "states": ["s0", "s1"], "labels": ["a"],
  "transitions": {"a": ["s1", "s1"]}, "valuation": {"p": ["s1"]}})";
const char* kPartialModel = R"({"mode": "partial", "states": ["s0"], "labels": ["a"],
  "transitions": {"a": [null]}, "valuation": {}})";

}  // namespace

TEST_CASE("cli examples") {
  auto r = cli({"eval", corpus_path("power_alpha3.mt")});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "next[a] (\\x:int. x * (x * (x * 1)))\n");

  r = cli({"normalize", "--trace-paths", scratch("trace.mt", "prev[a] (next[a] ((\\x:b. x) y))")});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "a^-1\neps\ny\n");

  r = cli({"proof", "check", "--mode", "same-stage", corpus_path("proofs/code_bot_elim.prf")});
  CHECK(r.code == kExitDomainError);
  CHECK(r.err.find("SideConditionFailure") != std::string::npos);
  CHECK(cli({"proof", "check", corpus_path("proofs/code_bot_elim.prf")}).code == kExitOk);
}

TEST_CASE("cli exit codes by error class") {
  const std::string ok_term = scratch("ok.mt", "(\\x:int. x) 1");
  const std::string syntax = scratch("syntax.mt", "\\x:int. (x");
  const std::string ill_typed = scratch("ill.mt", "1 2");
  const std::string stuck = scratch("stuck.mt", "prev[a] 1");
  const std::string loop = scratch("loop.mt", "(fix f: int -> int. \\n:int. f n) 0");
  const std::string circle = scratch("circle.src", "next (\\x:b. x)");
  const std::string csp = scratch("csp.src", "%(\\x:int. x)");
  const std::string box_deep = scratch("deep.src", "unbox[2] k");
  const std::string prf_bad = scratch("bad.prf", R"({"rule": "ArrowE", "premises": []})");
  const std::string prf_json = scratch("broken.prf", "{");
  const std::string model = scratch("m.kmodel", kModel);
  const std::string partial_model = scratch("p.kmodel", kPartialModel);
  const std::string model_bad = scratch("bad.kmodel", R"({"mode": "total", "states": []})");
  const std::string valid = scratch("valid.prop", "<a>p -> <a>p");
  const std::string invalid = scratch("invalid.prop", "p");
  const std::string dual = scratch("dual.prop", "<a>p -> ~<a>~p");
  const std::string unbound = scratch("unbound.prop", "<c>p");

  struct Row {
    std::vector<std::string> args;
    int code;
  };
  const std::vector<Row> table = {
      // success
      {{"typecheck", ok_term}, kExitOk},
      {{"typecheck", "--staged", corpus_path("power_forall_staged.mt")}, kExitOk},
      {{"typecheck", "--stage", "a", "--context", "x : b @ [a]", scratch("x.mt", "x")}, kExitOk},
      {{"eval", ok_term}, kExitOk},
      {{"normalize", ok_term}, kExitOk},
      {{"erase", ok_term}, kExitOk},
      {{"erased-eval", ok_term}, kExitOk},
      {{"embed", "--from", "circle", circle}, kExitOk},
      {{"model", "check", "--model", model, "--formula", valid}, kExitOk},
      {{"harness", "run", "--suite", "subject-reduction", "--seed", "3", "--cases", "5"}, kExitOk},
      {{"--help"}, kExitOk},
      // usage and syntax errors
      {{}, kExitUsageError},
      {{"frobnicate"}, kExitUsageError},
      {{"eval"}, kExitUsageError},
      {{"eval", "--fuel", "lots", ok_term}, kExitUsageError},
      {{"eval", "/nonexistent/file.mt"}, kExitUsageError},
      {{"typecheck", syntax}, kExitUsageError},
      {{"embed", "--from", "fortran", circle}, kExitUsageError},
      {{"proof", "check", "--mode", "sideways", prf_bad}, kExitUsageError},
      {{"proof", "check", prf_json}, kExitUsageError},
      {{"model", "check", "--model", model_bad, "--formula", valid}, kExitUsageError},
      {{"harness", "run", "--suite", "nope"}, kExitUsageError},
      // domain errors
      {{"typecheck", ill_typed}, kExitDomainError},
      {{"eval", stuck}, kExitDomainError},
      {{"eval", "--fuel", "100", loop}, kExitDomainError},
      {{"erased-eval", "--fuel", "100", loop}, kExitDomainError},
      {{"normalize", "--fuel", "0", ok_term}, kExitDomainError},
      {{"embed", "--from", "lambda-i", csp}, kExitDomainError},
      {{"embed", "--from", "box", box_deep}, kExitDomainError},
      {{"proof", "check", prf_bad}, kExitDomainError},
      {{"model", "check", "--model", model, "--formula", invalid}, kExitDomainError},
      {{"model", "check", "--model", partial_model, "--formula", dual}, kExitDomainError},
      {{"model", "check", "--model", model, "--formula", dual}, kExitOk},
      {{"model", "check", "--model", model, "--formula", unbound}, kExitDomainError},
  };
  for (const auto& row : table) {
    std::string joined;
    for (const auto& a : row.args) joined += a + " ";
    CAPTURE(joined);
    auto r = cli(row.args);
    CAPTURE(r.err);
    CHECK(r.code == row.code);
    if (row.code == kExitOk) CHECK(!r.out.empty());
    if (row.code != kExitOk) CHECK(!r.err.empty());
  }
}

TEST_CASE("partial flag agrees with total semantics on total models") {
  const std::string model = scratch("m2.kmodel", kModel);
  const std::string f = scratch("f.prop", "<a>p -> ~<a>~p");
  CHECK(cli({"model", "check", "--model", model, "--formula", f}).code == kExitOk);
  CHECK(cli({"model", "check", "--partial", "--model", model, "--formula", f}).code == kExitOk);
}

TEST_CASE("harness seed comes from the environment") {
  setenv("STAGECRAFT_SEED", "77", 1);
  auto r = cli({"harness", "run", "--suite", "embeddings", "--cases", "3"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("seed 77") != std::string::npos);
  setenv("STAGECRAFT_SEED", "not-a-number", 1);
  CHECK(cli({"harness", "run", "--suite", "embeddings", "--cases", "3"}).code == kExitUsageError);
  unsetenv("STAGECRAFT_SEED");
  CHECK(cli({"harness", "run", "--suite", "embeddings", "--cases", "3", "--seed", "5"}).out.find("seed 5") !=
        std::string::npos);
}

TEST_CASE("core grammar round-trips on generated terms") {
  std::mt19937_64 rng(99);
  gen::Config pure;
  gen::Config miniml;
  miniml.arithmetic = true;
  miniml.fix = true;
  miniml.single_instantiation = true;
  for (int i = 0; i < 300; ++i) {
    const gen::Config& cfg = i % 2 ? pure : miniml;
    auto s = gen::well_typed_retry(rng, cfg, gen::pure_context(cfg), i % 3 ? Transition{} : parse_transition("a b"));
    CAPTURE(to_string(s.term));
    CHECK(parse_term(to_string(s.term)) == s.term);
    CHECK(parse_type(to_string(s.type)) == s.type);
    CHECK(parse_type(prop_to_string(s.type)) == s.type);
    CHECK(parse_context(to_string(s.context)).entries().size() == s.context.entries().size());
    CHECK(to_string(parse_context(to_string(s.context))) == to_string(s.context));
  }
}

TEST_CASE("harness runs are deterministic and thread-independent") {
  harness::Options par{STAGECRAFT_CORPUS_DIR, true};
  harness::Options ser{STAGECRAFT_CORPUS_DIR, false};
  for (const auto& suite : harness::suite_names()) {
    CAPTURE(suite);
    auto a = harness::run_suite(suite, 11, 24, par);
    auto b = harness::run_suite(suite, 11, 24, ser);
    CHECK(a.ok());
    CHECK(a.checks == b.checks);
    CHECK(a.violations == b.violations);
    CHECK(a.counters == b.counters);
    CHECK(a.skipped == b.skipped);
  }
  CHECK_THROWS_AS(harness::run_suite("nope", 1, 1, par), std::invalid_argument);
}
