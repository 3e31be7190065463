#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "stagecraft/context.hpp"
#include "stagecraft/term.hpp"

namespace stagecraft {

enum class TypeErrorKind {
  VarStageMismatch,
  UnboundVariable,
  NotAFunction,
  ArgumentMismatch,
  NotCode,
  NotForall,
  GenEscape,
  ConditionNotBool,
  BranchMismatch,
  ArithNotInt,
  FixAnnotationNotArrow,
  FixBodyMismatch,
  PrevStageMismatch,
  // staged system only
  WfFailure,
  Ins1ShapeMismatch,
  Ins2UndeclaredStage,
};

const char* to_string(TypeErrorKind k);

struct TypeError : std::runtime_error {
  TypeError(TypeErrorKind kind, Position position, const std::string& detail);
  TypeErrorKind kind;
  Position position;
  std::string detail;
};

std::string to_string(const Position& p);

// Gamma |-^A M : tau. Throws TypeError. Binders are nameless, so the gen side
// condition holds by construction; a term variable used at a stage that
// mentions an enclosing gen variable is reported as GenEscape.
Type typecheck(const TypingContext& g, const Transition& stage, const Term& m);
std::optional<Type> try_typecheck(const TypingContext& g, const Transition& stage, const Term& m);

}  // namespace stagecraft
