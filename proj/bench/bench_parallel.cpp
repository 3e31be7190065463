#include <benchmark/benchmark.h>

#include "stagecraft/harness.hpp"
#include "stagecraft/logic.hpp"
#include "stagecraft/syntax.hpp"

using namespace stagecraft;

namespace {

// Valid formula with two free transition variables: every (valuation, state)
// pair is visited.
const Prop kFormula = parse_type("<a><b>p -> <a><b>p");

KripkeModel model(benchmark::State& st) {
  return random_model(static_cast<std::size_t>(st.range(0)), 3, false, 42);
}

void BM_HoldsLocallySerial(benchmark::State& st) {
  KripkeModel m = model(st);
  for (auto _ : st) benchmark::DoNotOptimize(holds_locally_serial(m, {}, kFormula));
}

void BM_HoldsLocallyParallel(benchmark::State& st) {
  KripkeModel m = model(st);
  for (auto _ : st) benchmark::DoNotOptimize(holds_locally(m, {}, kFormula));
}

void BM_HarnessSerial(benchmark::State& st) {
  harness::Options opts{harness::default_corpus_dir(), false};
  for (auto _ : st) benchmark::DoNotOptimize(harness::run_suite("confluence", 1, 200, opts));
}

void BM_HarnessParallel(benchmark::State& st) {
  harness::Options opts{harness::default_corpus_dir(), true};
  for (auto _ : st) benchmark::DoNotOptimize(harness::run_suite("confluence", 1, 200, opts));
}

}  // namespace

BENCHMARK(BM_HoldsLocallySerial)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HoldsLocallyParallel)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HarnessSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HarnessParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
