#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stagecraft/context.hpp"
#include "stagecraft/term.hpp"

namespace stagecraft::gen {

struct Config {
  std::size_t max_size = 30;
  std::vector<std::string> transition_vars{"a", "b", "c"};
  bool base_b = true;       // uninterpreted base type b
  bool int_constants = true;
  bool arithmetic = false;  // binops, booleans, conditionals
  bool fix = false;
  bool quantifiers = true;
  bool single_instantiation = false;  // also emit M @! b
  std::size_t type_depth = 2;
};

struct Sample {
  TypingContext context;
  Transition stage;
  Term term;
  Type type;
};

// Type-directed generation with bounded backtracking. The result always
// typechecks under (context, stage); nullopt when the budget runs out.
std::optional<Sample> well_typed(std::mt19937_64& rng, const Config& cfg, const TypingContext& ctx,
                                 const Transition& stage, std::optional<Type> target = std::nullopt);

// Repeats well_typed with fresh targets until it succeeds.
Sample well_typed_retry(std::mt19937_64& rng, const Config& cfg, const TypingContext& ctx, const Transition& stage);

Type random_type(std::mt19937_64& rng, const Config& cfg, std::size_t depth, std::uint32_t bound_depth = 0);

// Variables of base and code types spread over a few stages.
TypingContext pure_context(const Config& cfg);
// Same idea with no variable at the empty stage.
TypingContext epsilon_free_context(const Config& cfg);

std::uint64_t case_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace stagecraft::gen
