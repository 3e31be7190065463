#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "stagecraft/term.hpp"

namespace stagecraft {

struct EvalResult {
  enum class Kind { Value, Err, FuelExhausted };
  Kind kind;
  std::optional<Term> value;
  std::size_t steps = 0;  // rule applications consumed

  bool is_value() const { return kind == Kind::Value; }
  bool is_err() const { return kind == Kind::Err; }
  bool is_fuel_exhausted() const { return kind == Kind::FuelExhausted; }
};

// Nesting deeper than this is reported as FuelExhausted.
inline constexpr std::size_t kMaxEvalDepth = 4000;

// Big-step evaluation at the given stage with error propagation. Fuel bounds
// the number of rule applications. Never typechecks and never throws.
EvalResult eval(const Transition& stage, const Term& m, std::size_t fuel);

// Value judgment for the stage: at epsilon, constants, lambdas, quoted values
// and transition abstractions of values; above epsilon, residual code.
bool is_value(const Transition& stage, const Term& m);

std::string describe(const EvalResult& r);

// run M is instantiation at epsilon.
Term desugar_run(const Term& m);
// Cross-stage persistence of closed code: gen b. prev[a] (M @[a b]).
Term desugar_csp(const Term& m, const TransitionVar& a, const std::string& b_hint = "b");

}  // namespace stagecraft
