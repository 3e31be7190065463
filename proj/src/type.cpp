#include "stagecraft/type.hpp"

#include <boost/container_hash/hash.hpp>

namespace stagecraft {

Type Type::base(std::string name) { return Type(std::make_shared<TypeNode>(TypeNode{Base{std::move(name)}})); }
Type Type::integer() {
  static const Type t(std::make_shared<TypeNode>(TypeNode{Int{}}));
  return t;
}
Type Type::boolean() {
  static const Type t(std::make_shared<TypeNode>(TypeNode{Bool{}}));
  return t;
}
Type Type::bot() {
  static const Type t(std::make_shared<TypeNode>(TypeNode{Bot{}}));
  return t;
}
Type Type::arrow(Type dom, Type cod) {
  return Type(std::make_shared<TypeNode>(TypeNode{Arrow{std::move(dom), std::move(cod)}}));
}
Type Type::code(TransitionVar var, Type body) {
  return Type(std::make_shared<TypeNode>(TypeNode{Code{std::move(var), std::move(body)}}));
}
Type Type::code(const Transition& path, Type body) {
  for (auto it = path.vars().rbegin(); it != path.vars().rend(); ++it) body = code(*it, std::move(body));
  return body;
}
Type Type::forall(std::string hint, Type body) {
  return Type(std::make_shared<TypeNode>(TypeNode{Forall{std::move(hint), std::nullopt, std::move(body)}}));
}
Type Type::forall_at(std::string hint, Transition stage, Type body) {
  return Type(std::make_shared<TypeNode>(TypeNode{Forall{std::move(hint), std::move(stage), std::move(body)}}));
}

bool operator==(const Type& a, const Type& b) {
  if (a.identity() == b.identity()) return true;
  if (a.node().v.index() != b.node().v.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using N = std::decay_t<decltype(x)>;
        const N& y = *b.as<N>();
        if constexpr (std::is_same_v<N, Type::Base>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<N, Type::Arrow>) {
          return x.dom == y.dom && x.cod == y.cod;
        } else if constexpr (std::is_same_v<N, Type::Code>) {
          return x.var == y.var && x.body == y.body;
        } else if constexpr (std::is_same_v<N, Type::Forall>) {
          return x.stage == y.stage && x.body == y.body;
        } else {
          return true;
        }
      },
      a.node().v);
}

namespace {
void hash_tvar(std::size_t& seed, const TransitionVar& v) {
  boost::hash_combine(seed, v.is_free());
  if (v.is_free())
    boost::hash_combine(seed, v.name());
  else
    boost::hash_combine(seed, v.index());
}
}  // namespace

std::size_t hash_value(const Type& t) {
  std::size_t seed = t.node().v.index();
  std::visit(
      [&](const auto& x) {
        using N = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<N, Type::Base>) {
          boost::hash_combine(seed, x.name);
        } else if constexpr (std::is_same_v<N, Type::Arrow>) {
          boost::hash_combine(seed, hash_value(x.dom));
          boost::hash_combine(seed, hash_value(x.cod));
        } else if constexpr (std::is_same_v<N, Type::Code>) {
          hash_tvar(seed, x.var);
          boost::hash_combine(seed, hash_value(x.body));
        } else if constexpr (std::is_same_v<N, Type::Forall>) {
          if (x.stage) {
            for (const auto& v : *x.stage) hash_tvar(seed, v);
            boost::hash_combine(seed, x.stage->size());
          }
          boost::hash_combine(seed, hash_value(x.body));
        }
      },
      t.node().v);
  return seed;
}

Type map_tvars(const Type& t, const TVarMap& f, std::uint32_t depth) {
  return std::visit(
      [&](const auto& x) -> Type {
        using N = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<N, Type::Arrow>) {
          return Type::arrow(map_tvars(x.dom, f, depth), map_tvars(x.cod, f, depth));
        } else if constexpr (std::is_same_v<N, Type::Code>) {
          return Type::code(f(x.var, depth), map_tvars(x.body, f, depth));
        } else if constexpr (std::is_same_v<N, Type::Forall>) {
          std::optional<Transition> stage;
          if (x.stage) {
            std::vector<TransitionVar> vs;
            for (const auto& v : *x.stage) {
              Transition r = f(v, depth);
              vs.insert(vs.end(), r.begin(), r.end());
            }
            stage = Transition(std::move(vs));
          }
          Type body = map_tvars(x.body, f, depth + 1);
          return stage ? Type::forall_at(x.hint, *stage, body) : Type::forall(x.hint, body);
        } else {
          return t;
        }
      },
      t.node().v);
}

Type shift(const Type& t, std::int64_t delta, std::uint32_t cutoff) {
  if (delta == 0) return t;
  return map_tvars(t, [&](const TransitionVar& v, std::uint32_t d) {
    if (v.is_bound() && v.index() >= cutoff + d) return Transition{TransitionVar::bound(static_cast<std::uint32_t>(v.index() + delta))};
    return Transition{v};
  });
}

Type substitute(const Type& t, const TransitionVar& target, const Transition& b) {
  return map_tvars(t, [&](const TransitionVar& v, std::uint32_t d) {
    if (target.is_free() ? v == target : (v.is_bound() && v.index() == target.index() + d)) return shift(b, d);
    return Transition{v};
  });
}

Type instantiate(const Type& forall_body, const Transition& b) {
  return shift(substitute(forall_body, TransitionVar::bound(0), shift(b, 1)), -1, 1);
}

Type abstract(const Type& t, const std::string& name) {
  return map_tvars(shift(t, 1), [&](const TransitionVar& v, std::uint32_t d) {
    if (v.is_free() && v.name() == name) return Transition{TransitionVar::bound(d)};
    return Transition{v};
  });
}

std::set<std::string> fmv(const Type& t) {
  std::set<std::string> out;
  map_tvars(t, [&](const TransitionVar& v, std::uint32_t) {
    if (v.is_free()) out.insert(v.name());
    return Transition{v};
  });
  return out;
}

bool has_bound_index(const Type& t, std::uint32_t index) {
  bool found = false;
  map_tvars(t, [&](const TransitionVar& v, std::uint32_t d) {
    if (v.is_bound() && v.index() == index + d) found = true;
    return Transition{v};
  });
  return found;
}

Type strip_stages(const Type& t) {
  return std::visit(
      [&](const auto& x) -> Type {
        using N = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<N, Type::Arrow>) {
          return Type::arrow(strip_stages(x.dom), strip_stages(x.cod));
        } else if constexpr (std::is_same_v<N, Type::Code>) {
          return Type::code(x.var, strip_stages(x.body));
        } else if constexpr (std::is_same_v<N, Type::Forall>) {
          return Type::forall(x.hint, strip_stages(x.body));
        } else {
          return t;
        }
      },
      t.node().v);
}

bool is_staged(const Type& t) {
  if (auto f = t.as<Type::Forall>()) return f->stage.has_value() || is_staged(f->body);
  if (auto a = t.as<Type::Arrow>()) return is_staged(a->dom) || is_staged(a->cod);
  if (auto c = t.as<Type::Code>()) return is_staged(c->body);
  return false;
}

Type natural_projection(const Type& t) {
  if (auto a = t.as<Type::Arrow>()) return Type::arrow(natural_projection(a->dom), natural_projection(a->cod));
  if (auto c = t.as<Type::Code>()) return natural_projection(c->body);
  if (auto f = t.as<Type::Forall>()) return natural_projection(f->body);
  return t;
}

std::size_t type_size(const Type& t) {
  if (auto a = t.as<Type::Arrow>()) return 1 + type_size(a->dom) + type_size(a->cod);
  if (auto c = t.as<Type::Code>()) return 1 + type_size(c->body);
  if (auto f = t.as<Type::Forall>()) return 1 + type_size(f->body);
  return 1;
}

}  // namespace stagecraft
