#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>

#include "stagecraft/context.hpp"
#include "stagecraft/evaluator.hpp"
#include "stagecraft/term.hpp"
#include "stagecraft/typing.hpp"

namespace stagecraft {

// Well-formedness under a transition environment. Foralls without a stage
// annotation are read as declared at the empty offset.
bool wf_transition(const TransitionEnv& d, const Transition& a);
bool wf_env(const TransitionEnv& d);
bool wf_type(const TransitionEnv& d, const Transition& a, const Type& t);
bool wf_context(const TransitionEnv& d, const TypingContext& g);

// Fill in missing forall stages with epsilon.
Type with_default_stages(const Type& t);

// Gamma; Delta |-s^A M : tau. The stage recorded on a gen is the one forced
// by the first use of its variable, or epsilon when the variable is unused.
// Throws TypeError.
Type staged_typecheck(const TypingContext& g, const TransitionEnv& d, const Transition& stage, const Term& m);
std::optional<Type> try_staged_typecheck(const TypingContext& g, const TransitionEnv& d, const Transition& stage,
                                         const Term& m);

// Terms with transitions erased. Lambda and fix carry a name hint only.
struct ErasedNode;

class Erased {
 public:
  struct Var {
    VarRef ref;
  };
  struct IntLit {
    Integer value;
  };
  struct BoolLit {
    bool value;
  };
  struct BinOp;
  struct If;
  struct Fix;
  struct Lam;
  struct App;
  struct Next;
  struct Prev;
  struct Gen;
  struct UnitApp;
  struct NatApp;
  template <class N>
    requires(!std::is_same_v<std::decay_t<N>, Erased>)
  explicit Erased(N n);

  const auto& node() const;
  template <class N>
  const N* as() const;
  template <class N>
  bool is() const {
    return as<N>() != nullptr;
  }

 private:
  std::shared_ptr<const ErasedNode> node_;
};

struct Erased::BinOp {
  BinOpKind op;
  Erased lhs, rhs;
};
struct Erased::If {
  Erased cond, then_branch, else_branch;
};
struct Erased::Fix {
  std::string hint;
  Erased body;
};
struct Erased::Lam {
  std::string hint;
  Erased body;
};
struct Erased::App {
  Erased fn, arg;
};
struct Erased::Next {
  Erased body;
};
struct Erased::Prev {
  Erased body;
};
struct Erased::Gen {
  Erased body;
};
struct Erased::UnitApp {
  Erased body;
};
struct Erased::NatApp {
  Erased body;
  std::size_t n;
};

struct ErasedNode {
  std::variant<Erased::Var, Erased::IntLit, Erased::BoolLit, Erased::BinOp, Erased::If, Erased::Fix, Erased::Lam,
               Erased::App, Erased::Next, Erased::Prev, Erased::Gen, Erased::UnitApp, Erased::NatApp>
      v;
};

template <class N>
  requires(!std::is_same_v<std::decay_t<N>, Erased>)
Erased::Erased(N n) : node_(std::make_shared<const ErasedNode>(ErasedNode{std::move(n)})) {}

inline const auto& Erased::node() const { return node_->v; }

template <class N>
const N* Erased::as() const {
  return std::get_if<N>(&node_->v);
}

bool operator==(const Erased& a, const Erased& b);
std::string to_string(const Erased& m);

Erased erase(const Term& m);
// Erased body with bound term index 0 replaced by n.
Erased open_term(const Erased& body, const Erased& n);

struct ErasedResult {
  EvalResult::Kind kind;
  std::optional<Erased> value;
  std::size_t steps = 0;
  bool is_value() const { return kind == EvalResult::Kind::Value; }
};

// Evaluation at a numeric stage. Rule applications are counted the same way
// as in eval so equal budgets are comparable.
ErasedResult erased_eval(std::size_t stage, const Erased& m, std::size_t fuel);
std::string describe(const ErasedResult& r);

}  // namespace stagecraft
