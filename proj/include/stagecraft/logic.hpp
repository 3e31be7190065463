#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stagecraft/type.hpp"

namespace stagecraft {

// Propositions are types; base types are propositional variables and bot is
// falsity.
using Prop = Type;

struct Assumption {
  Prop prop;
  Transition stage;
  bool operator==(const Assumption& o) const { return prop == o.prop && stage == o.stage; }
};

struct LogicJudgment {
  std::vector<Assumption> context;  // duplicate-free, in first-use order
  Transition stage;
  Prop prop;
};

bool context_contains(const std::vector<Assumption>& ctx, const Assumption& a);

// A natural-deduction tree. Parameters used per rule:
//   Hyp      prop, stage
//   ArrowI   prop (the discharged assumption, at the node's stage)
//   ArrowE   -
//   CodeI    var
//   CodeE    -
//   ForallI  var (free in the premise, bound in the conclusion)
//   ForallE  instance
//   BotE, BotE-Alt   prop, stage (the conclusion; discharges prop -> bot there)
struct Derivation {
  std::string rule;
  std::optional<Prop> prop;
  std::optional<Transition> stage;
  std::optional<std::string> var;
  std::optional<Transition> instance;
  std::vector<Derivation> premises;
  std::optional<LogicJudgment> conclusion;  // stated; may weaken the context
};

enum class ClassicalMode { AnyStage, SameStage };

enum class DerivationErrorKind { RuleMismatch, PremiseShapeError, SideConditionFailure };
const char* to_string(DerivationErrorKind k);

struct DerivationError : std::runtime_error {
  DerivationError(DerivationErrorKind kind, std::vector<std::size_t> path, const std::string& detail);
  DerivationErrorKind kind;
  std::vector<std::size_t> path;  // premise indices from the root
  std::string detail;
};

// Replays the tree and returns the root judgment with the least context the
// tree needs (or the stated one, when it is a weakening of it). Throws
// DerivationError.
LogicJudgment check_derivation(const Derivation& d, ClassicalMode mode);

// JSON record tree, see the README for the layout.
Derivation parse_derivation(std::string_view json_text);
std::string derivation_to_json(const Derivation& d);
std::string to_string(const LogicJudgment& j);

// Finite functional (or partial) transition system with a valuation.
struct KripkeModel {
  bool partial = false;
  std::vector<std::string> states;
  std::vector<std::string> labels;
  // transitions[label][state] is the target state index, or -1 if undefined.
  std::vector<std::vector<int>> transitions;
  // valuation[(name, state)] = true for the listed pairs only.
  std::vector<std::pair<std::string, std::vector<bool>>> valuation;

  bool holds(const std::string& p, std::size_t s) const;
};

KripkeModel parse_model(std::string_view json_text);
std::string model_to_json(const KripkeModel& m);

// State functions: f[s] is the image of s or -1.
using StateFn = std::vector<int>;

// Closure of the identity and the label functions under composition.
std::vector<StateFn> transition_monoid(const KripkeModel& m);

struct UnboundTransitionVar : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Transition valuation: free transition variables to monoid elements.
using TransValuation = std::vector<std::pair<std::string, StateFn>>;

bool satisfies(const KripkeModel& m, const TransValuation& rho, std::size_t s, const Prop& p);
// Same, with the monoid precomputed.
bool satisfies(const KripkeModel& m, const std::vector<StateFn>& monoid, const TransValuation& rho, std::size_t s,
               const Prop& p);

// Gamma ||- phi over every state and every valuation of the free transition
// variables. Parallel over (valuation, state) pairs.
bool holds_locally(const KripkeModel& m, const std::vector<Assumption>& ctx, const Prop& p);
// Serial reference implementation.
bool holds_locally_serial(const KripkeModel& m, const std::vector<Assumption>& ctx, const Prop& p);

// Brute-force satisfaction that quantifies over label sequences of length at
// most max_len instead of monoid elements. rho maps variables to sequences of
// label indices.
bool satisfies_by_sequences(const KripkeModel& m, const std::vector<std::pair<std::string, std::vector<std::size_t>>>& rho,
                            std::size_t s, const Prop& p, std::size_t max_len);

// Deterministic for a given seed. Valuation covers `props` (default p, q, r).
KripkeModel random_model(std::size_t state_count, std::size_t label_count, bool partial, std::uint64_t seed,
                         const std::vector<std::string>& props = {"p", "q", "r"});

// Random proposition over props p, q, r and bot, modalities over free_vars and
// bound variables, with at most max_quantifiers nested foralls.
Prop random_prop(std::uint64_t seed, std::size_t size, const std::vector<std::string>& free_vars,
                 std::size_t max_quantifiers);

}  // namespace stagecraft
