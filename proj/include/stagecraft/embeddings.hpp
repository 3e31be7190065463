#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stagecraft/context.hpp"
#include "stagecraft/term.hpp"
#include "stagecraft/type.hpp"

namespace stagecraft {

// Source calculi embedded into the core calculus: the linear-time calculus
// (next/prev over one implicit modality), the Kripke-style box calculus and the
// classifier calculus without cross-stage persistence.
enum class Dialect { Circle, Box, LambdaI };

struct SourceType {
  enum class Kind { Base, Int, Arrow, Circle, Box, CodeAt, Closed };
  Kind kind;
  std::string name;  // base name or classifier
  std::vector<SourceType> args;

  static SourceType base(std::string n) { return {Kind::Base, std::move(n), {}}; }
  static SourceType integer() { return {Kind::Int, {}, {}}; }
  static SourceType arrow(SourceType a, SourceType b) { return {Kind::Arrow, {}, {std::move(a), std::move(b)}}; }
  static SourceType circle(SourceType t) { return {Kind::Circle, {}, {std::move(t)}}; }
  static SourceType box(SourceType t) { return {Kind::Box, {}, {std::move(t)}}; }
  static SourceType code_at(SourceType t, std::string c) { return {Kind::CodeAt, std::move(c), {std::move(t)}}; }
  static SourceType closed(SourceType t) { return {Kind::Closed, {}, {std::move(t)}}; }

  bool operator==(const SourceType&) const = default;
};

struct SourceTerm {
  enum class Kind { Var, IntLit, Lam, App, Next, Prev, Box, Unbox, Bracket, Escape, Run, Open, Close, Csp };
  Kind kind;
  std::string name;                 // variable, binder or classifier ("" when missing)
  std::optional<SourceType> annot;  // lambda domain
  std::int64_t number = 0;          // literal value or unbox depth
  std::vector<SourceTerm> args;

  static SourceTerm var(std::string x) { return {Kind::Var, std::move(x), {}, 0, {}}; }
  static SourceTerm int_lit(std::int64_t n) { return {Kind::IntLit, {}, {}, n, {}}; }
  static SourceTerm lam(std::string x, std::optional<SourceType> t, SourceTerm body) {
    return {Kind::Lam, std::move(x), std::move(t), 0, {std::move(body)}};
  }
  static SourceTerm app(SourceTerm f, SourceTerm a) { return {Kind::App, {}, {}, 0, {std::move(f), std::move(a)}}; }
  static SourceTerm unary(Kind k, SourceTerm body, std::string classifier = {}) {
    return {k, std::move(classifier), {}, 0, {std::move(body)}};
  }
  static SourceTerm unbox(std::int64_t n, SourceTerm body) { return {Kind::Unbox, {}, {}, n, {std::move(body)}}; }

  bool operator==(const SourceTerm&) const = default;
};

struct SourceTypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class EmbedErrorKind { NotQuantifierFree, StackTooShallow, CSPPresent, MissingAnnotation };
const char* to_string(EmbedErrorKind k);

struct EmbedError : std::runtime_error {
  EmbedError(EmbedErrorKind kind, const std::string& detail);
  EmbedErrorKind kind;
};

// Linear-time calculus: variables carry a natural-number level.
struct CircleBinding {
  std::string name;
  SourceType type;
  std::size_t level;
};
using CircleContext = std::vector<CircleBinding>;

SourceType circle_typecheck(const CircleContext& g, std::size_t level, const SourceTerm& m);
Type embed_circle(const SourceType& t, const TransitionVar& a);
Term embed_circle(const SourceTerm& m, const TransitionVar& a);
TypingContext embed_circle(const CircleContext& g, const TransitionVar& a);
// Drops transition annotations. Throws NotQuantifierFree on gen, instantiation
// or forall types.
SourceTerm forget_to_circle(const Term& m);
SourceType forget_to_circle(const Type& t);
// All one-step reducts (beta and prev/next cancellation) in any position.
std::vector<SourceTerm> circle_reducts(const SourceTerm& m);

// Kripke-style box calculus: a stack of contexts, innermost last.
using BoxContext = std::vector<std::vector<std::pair<std::string, SourceType>>>;

SourceType box_typecheck(const BoxContext& g, const SourceTerm& m);
Type embed_box(const SourceType& t);
// a lists one distinct transition variable per stack level above the first.
Term embed_box(const SourceTerm& m, const Transition& a);
TypingContext embed_box(const BoxContext& g, const Transition& a);
std::vector<SourceTerm> box_beta_reducts(const SourceTerm& m);

// Classifier calculus: stages are classifier sequences.
struct LambdaIBinding {
  std::string name;
  SourceType type;
  std::vector<std::string> stage;
};
using LambdaIContext = std::vector<LambdaIBinding>;

SourceType lambda_i_typecheck(const LambdaIContext& g, const std::vector<std::string>& stage, const SourceTerm& m);
Type embed_lambda_i(const SourceType& t);
// Throws CSPPresent or MissingAnnotation.
Term embed_lambda_i(const SourceTerm& m);
TypingContext embed_lambda_i(const LambdaIContext& g);
Transition classifier_stage(const std::vector<std::string>& stage);

SourceTerm parse_source_term(Dialect d, std::string_view src);
SourceType parse_source_type(Dialect d, std::string_view src);
std::string to_string(const SourceTerm& m);
std::string to_string(const SourceType& t);
std::optional<Dialect> dialect_from_name(std::string_view name);

// Capture-avoiding substitution of a free variable, shared by the reducers.
SourceTerm substitute(const SourceTerm& m, const std::string& x, const SourceTerm& n);

// Well-typed random samples. Binder names are distinct within a sample.
struct CircleSample {
  CircleContext context;
  std::size_t level;
  SourceTerm term;
  SourceType type;
};
struct BoxSample {
  BoxContext context;
  Transition stage;  // one variable per stack level above the first
  SourceTerm term;
  SourceType type;
};
struct LambdaISample {
  LambdaIContext context;
  std::vector<std::string> stage;
  SourceTerm term;
  SourceType type;
};

CircleSample random_circle_sample(std::uint64_t seed, std::size_t max_size);
BoxSample random_box_sample(std::uint64_t seed, std::size_t max_size);
LambdaISample random_lambda_i_sample(std::uint64_t seed, std::size_t max_size);

}  // namespace stagecraft
