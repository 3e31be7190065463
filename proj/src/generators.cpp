#include "stagecraft/generators.hpp"

#include <algorithm>
#include <functional>

#include "stagecraft/syntax.hpp"
#include "stagecraft/typing.hpp"

namespace stagecraft::gen {

std::uint64_t case_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

TransitionVar random_tvar(std::mt19937_64& rng, const Config& cfg, std::uint32_t bound_depth) {
  std::size_t n = cfg.transition_vars.size() + bound_depth;
  std::size_t i = pick(rng, n);
  if (i < cfg.transition_vars.size()) return TransitionVar::free(cfg.transition_vars[i]);
  return TransitionVar::bound(static_cast<std::uint32_t>(i - cfg.transition_vars.size()));
}

Type random_base(std::mt19937_64& rng, const Config& cfg) {
  std::vector<Type> bases;
  if (cfg.base_b) bases.push_back(Type::base("b"));
  if (cfg.int_constants || cfg.arithmetic) bases.push_back(Type::integer());
  if (cfg.arithmetic) bases.push_back(Type::boolean());
  return bases[pick(rng, bases.size())];
}

}  // namespace

Type random_type(std::mt19937_64& rng, const Config& cfg, std::size_t depth, std::uint32_t bound_depth) {
  if (depth == 0) return random_base(rng, cfg);
  std::size_t r = pick(rng, 20);
  if (r < 8) return random_base(rng, cfg);
  if (r < 13) return Type::arrow(random_type(rng, cfg, depth - 1, bound_depth), random_type(rng, cfg, depth - 1, bound_depth));
  if (r < 17 || !cfg.quantifiers)
    return Type::code(random_tvar(rng, cfg, bound_depth), random_type(rng, cfg, depth - 1, bound_depth));
  // a quantifier that actually binds something
  Type body = random_type(rng, cfg, depth - 1, bound_depth + 1);
  return Type::forall("a", Type::code(TransitionVar::bound(0), body));
}

namespace {

class TermGen {
 public:
  TermGen(std::mt19937_64& rng, const Config& cfg, const TypingContext& ctx) : rng_(rng), cfg_(cfg) {
    for (const auto& [x, b] : ctx.entries()) free_.push_back({x, b});
  }

  std::optional<Term> gen(const Type& t, const Transition& a, std::size_t size) {
    if (budget_ == 0) return std::nullopt;
    --budget_;
    std::vector<std::pair<int, std::function<std::optional<Term>()>>> options;
    // variables
    std::vector<Term> vars = matching_vars(t, a);
    if (!vars.empty()) options.push_back({size <= 2 ? 30 : 2, [&, vars] { return vars[pick(rng_, vars.size())]; }});
    if (t.is<Type::Int>() && (cfg_.int_constants || cfg_.arithmetic))
      options.push_back({size <= 2 ? 20 : 1, [&] { return Term::int_lit(static_cast<long>(pick(rng_, 6))); }});
    if (t.is<Type::Bool>() && cfg_.arithmetic)
      options.push_back({size <= 2 ? 20 : 1, [&] { return Term::bool_lit(coin(rng_, 0.5)); }});
    // introductions
    if (const auto* ar = t.as<Type::Arrow>()) {
      options.push_back({10, [&, ar] { return lam(ar->dom, ar->cod, a, size); }});
      if (cfg_.fix && size >= 4) options.push_back({2, [&] { return fix(t, a, size); }});
    }
    if (const auto* c = t.as<Type::Code>())
      options.push_back({10, [&, c] {
                           auto b = gen(c->body, a + c->var, size > 1 ? size - 1 : 1);
                           return b ? std::optional<Term>(Term::next(c->var, *b)) : std::nullopt;
                         }});
    if (const auto* f = t.as<Type::Forall>())
      options.push_back({10, [&, f] {
                           ++depth_;
                           auto b = gen(f->body, shift(a, 1), size > 1 ? size - 1 : 1);
                           --depth_;
                           return b ? std::optional<Term>(Term::gen(f->hint, *b)) : std::nullopt;
                         }});
    // eliminations
    if (size >= 4) options.push_back({7, [&] { return app(t, a, size); }});
    if (size >= 3 && !a.empty()) options.push_back({6, [&] { return prev(t, a, size); }});
    if (size >= 4 && cfg_.quantifiers) options.push_back({4, [&] { return tapp(t, a, size); }});
    if (cfg_.arithmetic && size >= 3 && (t.is<Type::Int>() || t.is<Type::Bool>()))
      options.push_back({6, [&] { return binop(t, a, size); }});
    if (cfg_.arithmetic && size >= 5) options.push_back({3, [&] { return cond(t, a, size); }});

    while (!options.empty()) {
      int total = 0;
      for (const auto& o : options) total += o.first;
      int r = static_cast<int>(pick(rng_, static_cast<std::size_t>(total)));
      std::size_t i = 0;
      while (r >= options[i].first) r -= options[i++].first;
      auto res = options[i].second();
      if (res) return res;
      options.erase(options.begin() + static_cast<std::ptrdiff_t>(i));
    }
    return std::nullopt;
  }

 private:
  struct Local {
    Type type;
    Transition stage;
    std::uint32_t depth;
  };

  std::vector<Term> matching_vars(const Type& t, const Transition& a) const {
    std::vector<Term> out;
    for (const auto& [x, b] : free_)
      if (b.stage == a && b.type == t) out.push_back(Term::free_var(x));
    for (std::size_t i = 0; i < locals_.size(); ++i) {
      const Local& l = locals_[i];
      std::uint32_t crossed = depth_ - l.depth;
      if (shift(l.stage, crossed) == a && shift(l.type, crossed) == t)
        out.push_back(Term::bound_var(static_cast<std::uint32_t>(locals_.size() - 1 - i)));
    }
    return out;
  }

  std::optional<Term> lam(const Type& dom, const Type& cod, const Transition& a, std::size_t size) {
    locals_.push_back({dom, a, depth_});
    auto b = gen(cod, a, size > 1 ? size - 1 : 1);
    locals_.pop_back();
    if (!b) return std::nullopt;
    return Term::lam(pick_name(), dom, *b);
  }

  std::optional<Term> fix(const Type& t, const Transition& a, std::size_t size) {
    const auto* ar = t.as<Type::Arrow>();
    locals_.push_back({t, a, depth_});
    auto b = lam(ar->dom, ar->cod, a, size - 1);
    locals_.pop_back();
    if (!b) return std::nullopt;
    return Term::fix("f", t, *b);
  }

  std::optional<Term> app(const Type& t, const Transition& a, std::size_t size) {
    Type dom = random_type(rng_, cfg_, 1, depth_);
    std::size_t arg_size = 1 + pick(rng_, (size - 2) / 2 + 1);
    auto f = gen(Type::arrow(dom, t), a, size - 1 - arg_size);
    if (!f) return std::nullopt;
    auto x = gen(dom, a, arg_size);
    if (!x) return std::nullopt;
    return Term::app(*f, *x);
  }

  std::optional<Term> prev(const Type& t, const Transition& a, std::size_t size) {
    auto inner = gen(Type::code(a.last(), t), a.drop_last(), size - 1);
    if (!inner) return std::nullopt;
    return Term::prev(a.last(), *inner);
  }

  std::optional<Term> tapp(const Type& t, const Transition& a, std::size_t size) {
    // Choose forall b. s and B with s[b := B] = t.
    std::vector<std::pair<Type, Transition>> shapes;
    Type lifted = shift(t, 1);
    shapes.push_back({Type::code(TransitionVar::bound(0), lifted), Transition{}});
    if (const auto* c = t.as<Type::Code>()) {
      Type body = shift(c->body, 1);
      shapes.push_back({Type::code(TransitionVar::bound(0), body), Transition{c->var}});
      if (const auto* c2 = c->body.as<Type::Code>())
        shapes.push_back({Type::code(TransitionVar::bound(0), shift(c2->body, 1)), Transition{c->var, c2->var}});
    }
    auto [body, arg] = shapes[pick(rng_, shapes.size())];
    auto m = gen(Type::forall("a", body), a, size - 1);
    if (!m) return std::nullopt;
    if (cfg_.single_instantiation && arg.size() == 1 && coin(rng_, 0.5)) return Term::sins(*m, arg[0]);
    return Term::tapp(*m, arg);
  }

  std::optional<Term> binop(const Type& t, const Transition& a, std::size_t size) {
    BinOpKind op = t.is<Type::Bool>() ? BinOpKind::Eq
                                      : std::array{BinOpKind::Add, BinOpKind::Sub, BinOpKind::Mul}[pick(rng_, 3)];
    std::size_t ls = 1 + pick(rng_, (size - 1) / 2);
    auto l = gen(Type::integer(), a, ls);
    if (!l) return std::nullopt;
    auto r = gen(Type::integer(), a, size - 1 - ls > 0 ? size - 1 - ls : 1);
    if (!r) return std::nullopt;
    return Term::binop(op, *l, *r);
  }

  std::optional<Term> cond(const Type& t, const Transition& a, std::size_t size) {
    std::size_t part = (size - 1) / 3;
    auto c = gen(Type::boolean(), a, part);
    if (!c) return std::nullopt;
    auto x = gen(t, a, part);
    if (!x) return std::nullopt;
    auto y = gen(t, a, part);
    if (!y) return std::nullopt;
    return Term::if_(*c, *x, *y);
  }

  std::string pick_name() {
    static const char* names[] = {"x", "y", "z", "u", "v", "w"};
    return names[pick(rng_, 6)];
  }

  std::mt19937_64& rng_;
  const Config& cfg_;
  std::vector<std::pair<std::string, Binding>> free_;
  std::vector<Local> locals_;
  std::uint32_t depth_ = 0;
  std::size_t budget_ = 400;
};

}  // namespace

std::optional<Sample> well_typed(std::mt19937_64& rng, const Config& cfg, const TypingContext& ctx,
                                 const Transition& stage, std::optional<Type> target) {
  Type t = target ? *target : random_type(rng, cfg, cfg.type_depth);
  TermGen g(rng, cfg, ctx);
  std::size_t size = cfg.max_size / 2 + pick(rng, cfg.max_size - cfg.max_size / 2);
  auto m = g.gen(t, stage, size);
  if (!m || term_size(*m) > cfg.max_size) return std::nullopt;
  // the generator is type-directed; re-check as a guard
  auto checked = try_typecheck(ctx, stage, *m);
  if (!checked || !(*checked == t)) return std::nullopt;
  return Sample{ctx, stage, *m, t};
}

Sample well_typed_retry(std::mt19937_64& rng, const Config& cfg, const TypingContext& ctx, const Transition& stage) {
  while (true)
    if (auto s = well_typed(rng, cfg, ctx, stage)) return *s;
}

TypingContext pure_context(const Config& cfg) {
  TypingContext g;
  const auto& vs = cfg.transition_vars;
  Transition a = vs.empty() ? Transition{} : Transition{TransitionVar::free(vs[0])};
  g.bind("p", Type::base("b"), {});
  g.bind("q", Type::arrow(Type::base("b"), Type::base("b")), {});
  if (!vs.empty()) {
    g.bind("r", Type::base("b"), a);
    g.bind("s", Type::code(a[0], Type::base("b")), {});
  }
  if (vs.size() > 1) g.bind("t", Type::integer(), Transition{TransitionVar::free(vs[1])});
  return g;
}

TypingContext epsilon_free_context(const Config& cfg) {
  TypingContext g;
  const auto& vs = cfg.transition_vars;
  if (vs.empty()) return g;
  TransitionVar a = TransitionVar::free(vs[0]);
  g.bind("r", Type::integer(), Transition{a});
  g.bind("h", Type::arrow(Type::integer(), Type::integer()), Transition{a});
  if (vs.size() > 1) {
    TransitionVar b = TransitionVar::free(vs[1]);
    g.bind("k", Type::code(b, Type::integer()), Transition{a});
    g.bind("w", Type::integer(), Transition{a, b});
  }
  return g;
}

}  // namespace stagecraft::gen
