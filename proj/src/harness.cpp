#include "stagecraft/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "stagecraft/embeddings.hpp"
#include "stagecraft/evaluator.hpp"
#include "stagecraft/generators.hpp"
#include "stagecraft/logic.hpp"
#include "stagecraft/reduction.hpp"
#include "stagecraft/staged.hpp"
#include "stagecraft/syntax.hpp"
#include "stagecraft/typing.hpp"

namespace stagecraft::harness {

namespace {

constexpr std::size_t kFuel = 10000;
constexpr std::size_t kMaxFailures = 5;
constexpr std::size_t kParallelReductCap = 4096;

struct CaseResult {
  std::size_t checks = 0;
  std::size_t violations = 0;
  bool skipped = false;
  std::map<std::string, std::size_t> counters;
  std::vector<std::string> failures;

  void check(bool ok, const std::function<std::string()>& what) {
    ++checks;
    if (ok) return;
    ++violations;
    if (failures.size() < kMaxFailures) failures.push_back(what());
  }
};

struct Context {
  std::uint64_t seed;
  std::size_t index;
  const Options& opts;
  std::mt19937_64 rng() const { return std::mt19937_64(gen::case_seed(seed, index)); }
};

using CaseFn = std::function<CaseResult(const Context&)>;

gen::Sample pure_sample(const Context& c) {
  gen::Config cfg;
  auto rng = c.rng();
  Transition stage = c.index % 3 == 2 ? Transition{TransitionVar::free("a")} : Transition{};
  return gen::well_typed_retry(rng, cfg, gen::pure_context(cfg), stage);
}

std::string show(const gen::Sample& s) { return to_string(s.term); }

CaseResult subject_reduction(const Context& c) {
  CaseResult r;
  gen::Sample s = pure_sample(c);
  for (const auto& step : redexes(s.term)) {
    auto t = try_typecheck(s.context, s.stage, step.result);
    r.check(t && *t == s.type, [&] { return "reduct " + to_string(step.result) + " of " + show(s) + " changes type"; });
    r.check(path_leq(Path{}, Path(s.stage) * step.path), [&] { return "negative annotation in " + show(s); });
  }
  r.counters["redexes"] += redexes(s.term).size();
  return r;
}

CaseResult confluence(const Context& c) {
  CaseResult r;
  gen::Sample s = pure_sample(c);
  Term star = complete_development(s.term);
  r.check(parallel_reduce_check(s.term, star), [&] { return "complete development is not a parallel reduct: " + show(s); });
  try {
    for (const auto& n : parallel_reducts(s.term, kParallelReductCap))
      r.check(parallel_reduce_check(n, star), [&] { return "diamond fails for " + show(s) + " via " + to_string(n); });
  } catch (const std::length_error&) {
    ++r.counters["parallel_reducts_capped"];
  }
  auto rng = c.rng();
  rng.discard(1000);
  auto random_walk = [&] {
    Term t = s.term;
    std::size_t len = rng() % 7;
    for (std::size_t i = 0; i < len; ++i) {
      auto rs = redexes(t);
      if (rs.empty()) break;
      t = rs[rng() % rs.size()].result;
    }
    return t;
  };
  Term left = random_walk();
  Term right = random_walk();
  auto nl = normalize(left, kFuel);
  auto nr = normalize(right, kFuel);
  r.check(nl.normal_form && nr.normal_form && *nl.normal_form == *nr.normal_form,
          [&] { return "two reduction sequences diverge on " + show(s); });
  return r;
}

CaseResult normalization(const Context& c) {
  CaseResult r;
  gen::Sample s = pure_sample(c);
  auto n = normalize(s.term, kFuel);
  r.check(n.normal_form.has_value(), [&] { return "no normal form within fuel: " + show(s); });
  Term before = s.term;
  std::size_t beta = 0;
  for (const auto& st : n.trace) {
    Term pb = natural_projection(before);
    Term pa = natural_projection(st.result);
    if (st.rule == RedexRule::Beta) {
      ++beta;
      bool found = false;
      for (const auto& q : redexes(pb)) found = found || (q.rule == RedexRule::Beta && q.result == pa);
      r.check(found, [&] { return "beta step not mirrored by the projection in " + show(s); });
    } else {
      r.check(pa == pb, [&] { return "non-beta step changes the projection in " + show(s); });
    }
    before = st.result;
  }
  // the projection is a plain lambda term; its leftmost-outermost run is a witness it normalizes too
  auto pn = normalize(natural_projection(s.term), kFuel);
  r.check(pn.normal_form.has_value(), [&] { return "projection does not normalize: " + show(s); });
  r.counters["steps"] += n.trace.size();
  r.counters["beta_steps"] += beta;
  return r;
}

std::vector<Path> probe_paths() {
  auto l = [](const char* v, bool inv = false) { return Path::letter(TransitionVar::free(v), inv); };
  return {Path{}, l("a"), l("a", true), l("b"), l("b", true), l("c"), l("a") * l("b"), l("a", true) * l("b", true),
          l("b") * l("a", true), l("a") * l("a")};
}

CaseResult time_ordered(const Context& c) {
  CaseResult r;
  gen::Sample s = pure_sample(c);
  auto n = normalize(s.term, kFuel);
  std::vector<Term> terms{s.term};
  for (const auto& st : n.trace) terms.push_back(st.result);
  if (terms.size() > 40) terms.erase(terms.begin() + 40, terms.end());
  const auto paths = probe_paths();
  for (const auto& m : terms)
    for (const auto& t : paths) {
      if (!is_T_normal({}, t, m)) continue;
      for (const auto& st : redexes(m))
        r.check(is_T_normal({}, t, st.result),
                [&] { return "T-normality at " + to_string(t) + " lost by reducing " + to_string(m); });
    }
  try {
    auto ts = time_ordered_sequence(s.term, kFuel);
    for (std::size_t i = 1; i < ts.trace.size(); ++i)
      r.check(time_order(ts.trace[i - 1].path, ts.trace[i].path) <= 0,
              [&] { return "time-ordered trace not monotone for " + show(s); });
    r.check(ts.normal_form && n.normal_form && *ts.normal_form == *n.normal_form,
            [&] { return "time-ordered normal form differs for " + show(s); });
  } catch (const std::logic_error& e) {
    r.check(false, [&] { return std::string("time order does not refine the path order: ") + e.what(); });
  }
  return r;
}

gen::Config miniml_config() {
  gen::Config cfg;
  cfg.base_b = false;
  cfg.arithmetic = true;
  cfg.fix = true;
  return cfg;
}

CaseResult type_soundness(const Context& c) {
  CaseResult r;
  gen::Config cfg = miniml_config();
  auto rng = c.rng();
  TypingContext ctx = gen::epsilon_free_context(cfg);
  gen::Sample s = gen::well_typed_retry(rng, cfg, ctx, {});
  EvalResult e = eval({}, s.term, kFuel);
  r.check(!e.is_err(), [&] { return "well-typed program goes wrong: " + show(s); });
  if (e.is_fuel_exhausted()) ++r.counters["diverged"];
  if (!e.is_value()) return r;
  ++r.counters["values"];
  const Term& v = *e.value;
  r.check(is_value({}, v), [&] { return "result is not a value: " + to_string(v); });
  auto t = try_typecheck(ctx, {}, v);
  r.check(t && *t == s.type, [&] { return "result " + to_string(v) + " lost type " + to_string(s.type); });
  if (const auto* code = s.type.as<Type::Code>()) {
    ++r.counters["code_values"];
    const auto* q = v.as<Term::Next>();
    r.check(q && q->var == code->var, [&] { return "code-typed result is not a quote: " + to_string(v); });
    if (q) {
      auto inner = try_typecheck(restrict_context(ctx, Transition{code->var}), {}, q->body);
      r.check(inner && *inner == code->body, [&] { return "quoted body mistyped: " + to_string(v); });
    }
  }
  return r;
}

CaseResult erasure(const Context& c) {
  CaseResult r;
  gen::Config cfg = miniml_config();
  cfg.transition_vars = {"a", "b"};
  cfg.single_instantiation = true;
  TypingContext ctx = gen::epsilon_free_context(cfg);
  TransitionEnv delta;
  delta.declare("a", {}).declare("b", Transition{TransitionVar::free("a")});
  auto rng = c.rng();
  for (int attempt = 0; attempt < 64; ++attempt) {
    gen::Sample s = gen::well_typed_retry(rng, cfg, ctx, {});
    if (!try_staged_typecheck(ctx, delta, {}, s.term)) continue;
    EvalResult a = eval({}, s.term, kFuel);
    ErasedResult b = erased_eval(0, erase(s.term), kFuel);
    r.check(a.kind == b.kind,
            [&] { return "outcomes differ for " + show(s) + ": " + describe(a) + " vs " + describe(b); });
    r.check(a.steps == b.steps, [&] { return "step counts differ for " + show(s); });
    if (a.is_value() && b.value)
      r.check(erase(*a.value) == *b.value, [&] { return "erased values differ for " + show(s); });
    ++r.counters[a.is_value() ? "values" : a.is_err() ? "errors" : "diverged"];
    return r;
  }
  r.skipped = true;
  return r;
}

std::vector<std::pair<std::string, Derivation>> load_proofs(const std::string& dir) {
  std::vector<std::pair<std::string, Derivation>> out;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(std::filesystem::path(dir) / "proofs"))
    if (e.path().extension() == ".prf") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    std::stringstream ss;
    ss << in.rdbuf();
    out.push_back({f.stem().string(), parse_derivation(ss.str())});
  }
  return out;
}

CaseResult logic_soundness(const Context& c) {
  CaseResult r;
  static const auto proofs = load_proofs(c.opts.corpus_dir);
  auto rng = c.rng();
  std::size_t states = 1 + c.index % 4;
  std::size_t labels = 1 + (c.index / 4) % 3;
  std::uint64_t mseed = rng();
  KripkeModel total = random_model(states, labels, false, mseed);
  KripkeModel partial = random_model(states, labels, true, mseed);
  for (const auto& [name, d] : proofs) {
    std::optional<LogicJudgment> judged;
    try {
      judged = check_derivation(d, ClassicalMode::AnyStage);
    } catch (const DerivationError& e) {
      r.check(false, [&] { return name + " rejected: " + e.what(); });
      continue;
    }
    const LogicJudgment& j = *judged;
    Prop goal = Type::code(j.stage, j.prop);
    r.check(holds_locally(total, j.context, goal), [&] { return name + " has a total countermodel"; });
    ++r.counters["total_checks"];
    bool same_stage = true;
    try {
      check_derivation(d, ClassicalMode::SameStage);
    } catch (const DerivationError&) {
      same_stage = false;
    }
    if (same_stage) {
      r.check(holds_locally(partial, j.context, goal), [&] { return name + " has a partial countermodel"; });
      ++r.counters["partial_checks"];
    }
  }
  // monoid quantification against label sequences on a tiny model
  std::size_t tiny_states = 1 + rng() % 2;
  bool tiny_partial = rng() % 2 == 0;
  KripkeModel tiny = random_model(tiny_states, 2, tiny_partial, rng());
  Prop phi = random_prop(rng(), 7, {"a"}, 2);
  std::vector<std::size_t> seq(rng() % 4);
  for (auto& l : seq) l = rng() % 2;
  StateFn f(tiny_states);
  for (std::size_t s = 0; s < tiny_states; ++s) {
    int t = static_cast<int>(s);
    for (std::size_t l : seq) t = t < 0 ? -1 : tiny.transitions[l][static_cast<std::size_t>(t)];
    f[s] = t;
  }
  std::size_t bound = tiny_partial ? 8 : 3;
  for (std::size_t s = 0; s < tiny_states; ++s)
    r.check(satisfies(tiny, {{"a", f}}, s, phi) == satisfies_by_sequences(tiny, {{"a", seq}}, s, phi, bound),
            [&] { return "monoid and sequence quantification disagree on " + to_string(phi); });
  ++r.counters["oracle_checks"];
  return r;
}

std::vector<std::string> sorted_terms(const std::vector<Term>& ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) out.push_back(to_string(t));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CaseResult embeddings(const Context& c) {
  CaseResult r;
  const TransitionVar a = TransitionVar::free("a");
  std::uint64_t base = gen::case_seed(c.seed, c.index);

  auto cs = random_circle_sample(base, 25);
  Transition level(std::vector<TransitionVar>(cs.level, a));
  Term ci = embed_circle(cs.term, a);
  auto ct = try_typecheck(embed_circle(cs.context, a), level, ci);
  r.check(ct && *ct == embed_circle(cs.type, a), [&] { return "circle image mistyped: " + to_string(cs.term); });
  r.check(forget_to_circle(ci) == cs.term, [&] { return "forget after embed is not the identity: " + to_string(cs.term); });
  std::vector<Term> src, dst;
  for (const auto& n : circle_reducts(cs.term)) src.push_back(embed_circle(n, a));
  for (const auto& st : redexes(ci)) dst.push_back(st.result);
  r.check(sorted_terms(src) == sorted_terms(dst), [&] { return "reducts differ under embedding: " + to_string(cs.term); });
  r.counters["circle_reducts"] += src.size();

  auto bs = random_box_sample(base + 1, 25);
  Term bi = embed_box(bs.term, bs.stage);
  auto bt = try_typecheck(embed_box(bs.context, bs.stage), bs.stage, bi);
  r.check(bt && *bt == embed_box(bs.type), [&] { return "box image mistyped: " + to_string(bs.term); });
  src.clear();
  dst.clear();
  for (const auto& n : box_beta_reducts(bs.term)) src.push_back(embed_box(n, bs.stage));
  for (const auto& st : redexes(bi))
    if (st.rule == RedexRule::Beta) dst.push_back(st.result);
  r.check(sorted_terms(src) == sorted_terms(dst), [&] { return "beta reducts differ under embedding: " + to_string(bs.term); });
  r.counters["box_reducts"] += src.size();

  auto ls = random_lambda_i_sample(base + 2, 25);
  Term li = embed_lambda_i(ls.term);
  auto lt = try_typecheck(embed_lambda_i(ls.context), classifier_stage(ls.stage), li);
  r.check(lt && *lt == embed_lambda_i(ls.type), [&] { return "classifier image mistyped: " + to_string(ls.term); });
  return r;
}

const std::map<std::string, CaseFn>& suites() {
  static const std::map<std::string, CaseFn> table = {
      {"subject-reduction", subject_reduction}, {"confluence", confluence},
      {"normalization", normalization},         {"time-ordered", time_ordered},
      {"type-soundness", type_soundness},       {"erasure", erasure},
      {"logic-soundness", logic_soundness},     {"embeddings", embeddings},
  };
  return table;
}

CaseResult guarded(const CaseFn& f, const Context& c) {
  try {
    return f(c);
  } catch (const std::exception& e) {
    CaseResult r;
    r.check(false, [&] { return "case " + std::to_string(c.index) + " threw: " + e.what(); });
    return r;
  }
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"subject-reduction", "confluence", "normalization", "time-ordered",
                                                 "type-soundness",    "erasure",    "logic-soundness", "embeddings"};
  return names;
}

SuiteReport run_suite(const std::string& suite, std::uint64_t seed, std::size_t cases, const Options& opts) {
  auto it = suites().find(suite);
  if (it == suites().end()) throw std::invalid_argument("unknown suite '" + suite + "'");
  const CaseFn& fn = it->second;
  auto start = std::chrono::steady_clock::now();
  std::vector<CaseResult> results(cases);
  const auto n = static_cast<std::int64_t>(cases);
  if (opts.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i)
      results[static_cast<std::size_t>(i)] = guarded(fn, Context{seed, static_cast<std::size_t>(i), opts});
  } else {
    for (std::int64_t i = 0; i < n; ++i)
      results[static_cast<std::size_t>(i)] = guarded(fn, Context{seed, static_cast<std::size_t>(i), opts});
  }
  SuiteReport rep;
  rep.suite = suite;
  rep.seed = seed;
  rep.cases = cases;
  for (const auto& r : results) {
    rep.checks += r.checks;
    rep.violations += r.violations;
    rep.skipped += r.skipped ? 1 : 0;
    for (const auto& [k, v] : r.counters) rep.counters[k] += v;
    for (const auto& f : r.failures)
      if (rep.failures.size() < kMaxFailures) rep.failures.push_back(f);
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::string format_report(const SuiteReport& r) {
  std::ostringstream os;
  os << r.suite << ": seed " << r.seed << ", " << r.cases << " cases, " << r.checks << " checks, " << r.violations
     << " violations, " << r.skipped << " skipped";
  for (const auto& [k, v] : r.counters) os << ", " << k << " " << v;
  os << " (" << std::fixed;
  os.precision(2);
  os << r.seconds << " s)\n";
  for (const auto& f : r.failures) os << "  " << f << "\n";
  return os.str();
}

std::string default_corpus_dir() {
  if (const char* env = std::getenv("STAGECRAFT_CORPUS")) return env;
  return STAGECRAFT_CORPUS_DIR;
}

}  // namespace stagecraft::harness
