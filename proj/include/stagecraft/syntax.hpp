#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "stagecraft/context.hpp"
#include "stagecraft/lexer.hpp"
#include "stagecraft/term.hpp"
#include "stagecraft/type.hpp"

namespace stagecraft {

// Recursive-descent parser for types, terms and stage annotations. Binder
// names are resolved to de Bruijn indices; unresolved names stay free.
class CoreParser {
 public:
  explicit CoreParser(TokenStream& ts) : ts_(ts) {}

  Type type();
  Term term();
  // "[a b c]"
  Transition bracketed_transition();
  TransitionVar transition_var();

  std::vector<std::string>& term_scope() { return term_scope_; }
  std::vector<std::string>& transition_scope() { return trans_scope_; }

 private:
  Type arrow_type();
  Type prefix_type();
  Type atom_type();
  Term eq_term();
  Term add_term();
  Term mul_term();
  Term prefix_term();
  Term app_term();
  bool at_atom_start() const;
  Term atom_term();

  TokenStream& ts_;
  std::vector<std::string> term_scope_;
  std::vector<std::string> trans_scope_;
};

Type parse_type(std::string_view src);
Term parse_term(std::string_view src);
// Whitespace-separated variable names, optionally in brackets; "" is epsilon.
Transition parse_transition(std::string_view src);
// "x : T @ [a b], y : T @ []"
TypingContext parse_context(std::string_view src);
// "a @ [], b @ [a]"
TransitionEnv parse_transition_env(std::string_view src);

std::string to_string(const Type& t);
std::string to_string(const Term& t);
// Prints A -> bot as ~A.
std::string prop_to_string(const Type& t);
std::string to_string(const TypingContext& g);
std::string to_string(const TransitionEnv& d);

std::ostream& operator<<(std::ostream& os, const Type& t);
std::ostream& operator<<(std::ostream& os, const Term& t);

// Pick a name based on hint that is not in `taken`.
std::string fresh_name(const std::string& hint, const std::vector<std::string>& taken_a,
                       const std::set<std::string>& taken_b);

}  // namespace stagecraft
