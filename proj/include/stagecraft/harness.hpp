#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace stagecraft::harness {

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t cases = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::size_t> counters;  // suite-specific tallies
  std::vector<std::string> failures;            // first few violations
  double seconds = 0;

  bool ok() const { return violations == 0; }
};

struct Options {
  std::string corpus_dir;  // location of proofs/ for the logic suite
  bool parallel = true;
};

// subject-reduction, confluence, normalization, time-ordered, type-soundness,
// erasure, logic-soundness, embeddings
const std::vector<std::string>& suite_names();

// Case i uses the seed case_seed(seed, i), so results do not depend on
// scheduling. Throws std::invalid_argument for an unknown suite.
SuiteReport run_suite(const std::string& suite, std::uint64_t seed, std::size_t cases, const Options& opts);

std::string format_report(const SuiteReport& r);

// Compiled-in corpus location, overridden by STAGECRAFT_CORPUS.
std::string default_corpus_dir();

}  // namespace stagecraft::harness
