#include <doctest.h>

#include <random>

#include "stagecraft/syntax.hpp"

using namespace stagecraft;

namespace {

TransitionVar tv(const char* n) { return TransitionVar::free(n); }

// Reference free-group reduction: delete adjacent inverse pairs until none remain.
std::vector<PathLetter> rewrite_to_fixpoint(std::vector<PathLetter> w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i].var == w[i + 1].var && w[i].inverse != w[i + 1].inverse) {
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        changed = true;
        break;
      }
    }
  }
  return w;
}

std::vector<PathLetter> random_word(std::mt19937_64& rng, std::size_t max_len) {
  const char* names[] = {"a", "b", "c"};
  std::vector<PathLetter> w;
  std::size_t n = rng() % (max_len + 1);
  for (std::size_t i = 0; i < n; ++i) w.push_back({tv(names[rng() % 3]), rng() % 2 == 0});
  return w;
}

}  // namespace

TEST_CASE("canonical form agrees with exhaustive rewriting") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    auto w = random_word(rng, 10);
    CHECK(Path::from_word(w).letters() == rewrite_to_fixpoint(w));
  }
}

TEST_CASE("equal canonical forms iff equal in the free group") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    auto w1 = random_word(rng, 6);
    auto w2 = random_word(rng, 6);
    // w1 = w2 in the free group iff w1 w2^-1 rewrites to the empty word
    std::vector<PathLetter> w = w1;
    for (auto it = w2.rbegin(); it != w2.rend(); ++it) w.push_back({it->var, !it->inverse});
    bool equal_in_group = rewrite_to_fixpoint(w).empty();
    CHECK((Path::from_word(w1) == Path::from_word(w2)) == equal_in_group);
  }
}

TEST_CASE("path order basics") {
  Path eps;
  Path a = Path::letter(tv("a"));
  Path ainv = Path::letter(tv("a"), true);
  Path b = Path::letter(tv("b"));
  CHECK(path_leq(eps, a));
  CHECK(path_leq(ainv, eps));
  CHECK(path_leq(ainv, b));
  CHECK_FALSE(path_leq(a, b));
  CHECK_FALSE(path_leq(a, eps));
  CHECK((a * ainv).is_epsilon());
  CHECK(time_order(ainv, eps) < 0);
  CHECK(time_order(eps, a) < 0);
}

TEST_CASE("time order is total and refines the prefix order") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 3000; ++i) {
    Path t = Path::from_word(random_word(rng, 5));
    Path u = Path::from_word(random_word(rng, 5));
    if (path_leq(t, u)) CHECK(time_order(t, u) <= 0);
    CHECK((time_order(t, u) == 0) == (t == u));
    CHECK((time_order(t, u) < 0) == (time_order(u, t) > 0));
  }
}

TEST_CASE("path substitution and binder erasure") {
  Path p = Path::from_word({{tv("b"), false}, {TransitionVar::bound(0), false}, {tv("b"), true}});
  CHECK(erase_binder(p).is_epsilon());
  Path q = substitute(Path::letter(tv("a"), true), tv("a"), Transition{tv("b"), tv("c")});
  CHECK(q == Path::from_word({{tv("c"), true}, {tv("b"), true}}));
}

TEST_CASE("transition substitution into prev reverses the sequence") {
  Term m = parse_term("prev[b] x");
  Term r = substitute(m, tv("b"), Transition{tv("a"), tv("c")});
  CHECK(r == parse_term("prev[c] (prev[a] x)"));
  Term n = substitute(parse_term("next[b] x"), tv("b"), Transition{tv("a"), tv("c")});
  CHECK(n == parse_term("next[a] (next[c] x)"));
  CHECK(substitute(parse_term("next[b] prev[b] x"), tv("b"), Transition{}) == parse_term("x"));
  Type t = substitute(parse_type("<b>int"), tv("b"), Transition{tv("a"), tv("c")});
  CHECK(t == parse_type("<a><c>int"));
}

TEST_CASE("pretty printing") {
  CHECK(to_string(parse_type("forall a. <a>(b -> b)")) == "forall a. <a>(b -> b)");
  CHECK(to_string(parse_term("next[a] (x y)")) == "next[a] (x y)");
  CHECK(to_string(parse_type("forall a @ [b c]. <a>int")) == "forall a @ [b c]. <a>int");
  CHECK(to_string(parse_term("\\x:int. x * (x * 1)")) == "\\x:int. x * (x * 1)");
  CHECK(to_string(parse_term("f (0 - 1) @[a b] @! c")) == "f (0 - 1) @[a b] @! c");
  CHECK(to_string(parse_term("(-3)")) == "(-3)");
  CHECK(prop_to_string(parse_type("(p -> bot) -> bot")) == "~~p");
  // a binder whose name clashes with a free variable is renamed on output
  Term shadow = Term::lam("x", Type::base("b"), Term::app(Term::bound_var(0), Term::free_var("x")));
  CHECK(to_string(shadow) == "\\x1:b. x1 x");
}

TEST_CASE("alpha-equivalence ignores binder names") {
  CHECK(parse_term("\\x:b. x") == parse_term("\\y:b. y"));
  CHECK(parse_term("gen a. next[a] y") == parse_term("gen c. next[c] y"));
  CHECK_FALSE(parse_term("gen a. next[a] y") == parse_term("gen c. next[a] y"));
  CHECK(parse_type("forall a. <a>b") == parse_type("forall z. <z>b"));
  CHECK_FALSE(parse_term("\\x:b. x") == parse_term("\\x:b. y"));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_term("\\x int. x"), ParseError);
  CHECK_THROWS_AS(parse_term("next a x"), ParseError);
  CHECK_THROWS_AS(parse_type("<a int"), ParseError);
  try {
    parse_term("f\n  )");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.col == 3);
  }
}

TEST_CASE("let is sugar for a beta-redex") {
  CHECK(parse_term("let y : int = 1 in y + y") == parse_term("(\\y:int. y + y) 1"));
}

TEST_CASE("fmv and natural projection") {
  Term m = parse_term("gen a. next[a] (prev[b] (x @[c a]))");
  CHECK(fmv(m) == std::set<std::string>{"b", "c"});
  CHECK(natural_projection(parse_term("gen a. next[a] ((\\x:<a>b. x) (prev[c] y) @[a])")) ==
        parse_term("(\\x:b. x) y"));
}
