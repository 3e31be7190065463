#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stagecraft/term.hpp"

namespace stagecraft {

enum class RedexRule { Beta, Ins, Quote };
const char* to_string(RedexRule r);

// One-step reduction labelled with its annotated path.
struct AnnotatedStep {
  Path path;
  Position position;
  Term result;  // the whole reduct
  RedexRule rule;
};

// All one-step reducts, leftmost-outermost first.
std::vector<AnnotatedStep> redexes(const Term& m);
// The leftmost-outermost step, if any.
std::optional<AnnotatedStep> step(const Term& m);

Term replace_at(const Term& m, const Position& p, const Term& replacement);

struct NormalizeResult {
  std::optional<Term> normal_form;  // empty when fuel ran out
  std::vector<AnnotatedStep> trace;
};

// Leftmost-outermost normalization bounded by `fuel` steps.
NormalizeResult normalize(const Term& m, std::size_t fuel);
// Always contracts a redex whose path is least in the time order. Throws
// std::logic_error if the time order fails to refine path_leq on the paths
// seen in the run.
NormalizeResult time_ordered_sequence(const Term& m, std::size_t fuel);

// Takes-all parallel step.
Term complete_development(const Term& m);
// Decides M => N for the parallel reduction relation.
bool parallel_reduce_check(const Term& m, const Term& n);
// Every N with M => N. Throws std::length_error past `cap` results.
std::vector<Term> parallel_reducts(const Term& m, std::size_t cap = 1u << 16);

// Inductive T-normality under Delta (variables mapped to epsilon). Terms with
// an elimination applied to the wrong introduction form are decided by the
// direct definition instead.
bool is_T_normal(const std::set<std::string>& delta, const Path& t, const Term& m);
// Direct definition: no redex whose annotation is <= T (after Delta := eps).
bool is_T_normal_direct(const std::set<std::string>& delta, const Path& t, const Term& m);
// True when some application, instantiation or prev is applied to an
// introduction form it cannot consume.
bool has_ill_shaped_elimination(const Term& m);

}  // namespace stagecraft
