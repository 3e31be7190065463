#include "stagecraft/logic.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "stagecraft/syntax.hpp"

namespace stagecraft {

using nlohmann::json;

const char* to_string(DerivationErrorKind k) {
  switch (k) {
    case DerivationErrorKind::RuleMismatch: return "RuleMismatch";
    case DerivationErrorKind::PremiseShapeError: return "PremiseShapeError";
    case DerivationErrorKind::SideConditionFailure: return "SideConditionFailure";
  }
  return "?";
}

namespace {

std::string path_string(const std::vector<std::size_t>& p) {
  if (p.empty()) return "root";
  std::ostringstream os;
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "." : "") << p[i];
  return os.str();
}

}  // namespace

DerivationError::DerivationError(DerivationErrorKind kind, std::vector<std::size_t> path, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at " + path_string(path) + ": " + detail),
      kind(kind),
      path(std::move(path)),
      detail(detail) {}

bool context_contains(const std::vector<Assumption>& ctx, const Assumption& a) {
  return std::find(ctx.begin(), ctx.end(), a) != ctx.end();
}

namespace {

void add_assumption(std::vector<Assumption>& ctx, const Assumption& a) {
  if (!context_contains(ctx, a)) ctx.push_back(a);
}

std::vector<Assumption> without(std::vector<Assumption> ctx, const Assumption& a) {
  ctx.erase(std::remove(ctx.begin(), ctx.end(), a), ctx.end());
  return ctx;
}

std::set<std::string> context_fmv(const std::vector<Assumption>& ctx) {
  std::set<std::string> out;
  for (const auto& a : ctx) {
    for (const auto& v : fmv(a.prop)) out.insert(v);
    for (const auto& v : fmv(a.stage)) out.insert(v);
  }
  return out;
}

class DerivationChecker {
 public:
  explicit DerivationChecker(ClassicalMode mode) : mode_(mode) {}

  LogicJudgment check(const Derivation& d) {
    LogicJudgment j = rule(d);
    if (d.conclusion) {
      const LogicJudgment& s = *d.conclusion;
      if (!(s.stage == j.stage) || !(s.prop == j.prop))
        fail(DerivationErrorKind::RuleMismatch,
             "stated conclusion " + to_string(s) + " differs from the derived " + to_string(j));
      for (const auto& a : j.context)
        if (!context_contains(s.context, a))
          fail(DerivationErrorKind::RuleMismatch,
               "stated context lacks " + prop_to_string(a.prop) + " @ " + to_string(a.stage));
      return s;
    }
    return j;
  }

 private:
  [[noreturn]] void fail(DerivationErrorKind k, const std::string& detail) { throw DerivationError(k, path_, detail); }

  LogicJudgment premise(const Derivation& d, std::size_t i) {
    path_.push_back(i);
    LogicJudgment j = check(d.premises[i]);
    path_.pop_back();
    return j;
  }

  void arity(const Derivation& d, std::size_t n) {
    if (d.premises.size() != n)
      fail(DerivationErrorKind::PremiseShapeError,
           d.rule + " takes " + std::to_string(n) + " premise(s), got " + std::to_string(d.premises.size()));
  }

  template <class T>
  const T& param(const std::optional<T>& p, const Derivation& d, const char* name) {
    if (!p) fail(DerivationErrorKind::RuleMismatch, d.rule + " needs parameter '" + name + "'");
    return *p;
  }

  LogicJudgment rule(const Derivation& d) {
    const std::string& r = d.rule;
    if (r == "Hyp") {
      arity(d, 0);
      const Prop& p = param(d.prop, d, "prop");
      const Transition& a = param(d.stage, d, "stage");
      return {{{p, a}}, a, p};
    }
    if (r == "ArrowI") {
      arity(d, 1);
      const Prop& p = param(d.prop, d, "prop");
      LogicJudgment j = premise(d, 0);
      return {without(j.context, {p, j.stage}), j.stage, Type::arrow(p, j.prop)};
    }
    if (r == "ArrowE") {
      arity(d, 2);
      LogicJudgment f = premise(d, 0);
      LogicJudgment x = premise(d, 1);
      const auto* arr = f.prop.as<Type::Arrow>();
      if (!arr) fail(DerivationErrorKind::PremiseShapeError, "first premise is not an implication");
      if (!(f.stage == x.stage)) fail(DerivationErrorKind::PremiseShapeError, "premises are at different stages");
      if (!(arr->dom == x.prop))
        fail(DerivationErrorKind::PremiseShapeError,
             "argument proves " + prop_to_string(x.prop) + ", expected " + prop_to_string(arr->dom));
      std::vector<Assumption> ctx = f.context;
      for (const auto& a : x.context) add_assumption(ctx, a);
      return {ctx, f.stage, arr->cod};
    }
    if (r == "CodeI") {
      arity(d, 1);
      TransitionVar v = TransitionVar::free(param(d.var, d, "var"));
      LogicJudgment j = premise(d, 0);
      if (j.stage.empty() || !(j.stage.last() == v))
        fail(DerivationErrorKind::PremiseShapeError, "premise stage " + to_string(j.stage) + " does not end with " + v.name());
      return {j.context, j.stage.drop_last(), Type::code(v, j.prop)};
    }
    if (r == "CodeE") {
      arity(d, 1);
      LogicJudgment j = premise(d, 0);
      const auto* c = j.prop.as<Type::Code>();
      if (!c) fail(DerivationErrorKind::PremiseShapeError, "premise is not a modal proposition");
      return {j.context, j.stage + c->var, c->body};
    }
    if (r == "ForallI") {
      arity(d, 1);
      const std::string& v = param(d.var, d, "var");
      LogicJudgment j = premise(d, 0);
      auto ctx_vars = context_fmv(j.context);
      if (ctx_vars.count(v)) fail(DerivationErrorKind::SideConditionFailure, v + " is free in the context");
      if (fmv(j.stage).count(v)) fail(DerivationErrorKind::SideConditionFailure, v + " occurs in the stage");
      return {j.context, j.stage, Type::forall(v, abstract(j.prop, v))};
    }
    if (r == "ForallE") {
      arity(d, 1);
      const Transition& b = param(d.instance, d, "instance");
      LogicJudgment j = premise(d, 0);
      const auto* f = j.prop.as<Type::Forall>();
      if (!f) fail(DerivationErrorKind::PremiseShapeError, "premise is not universally quantified");
      return {j.context, j.stage, instantiate(f->body, b)};
    }
    if (r == "BotE" || r == "BotE-Alt") {
      arity(d, 1);
      const Prop& p = param(d.prop, d, "prop");
      const Transition& a = param(d.stage, d, "stage");
      LogicJudgment j = premise(d, 0);
      if (!j.prop.is<Type::Bot>()) fail(DerivationErrorKind::PremiseShapeError, "premise does not prove bot");
      bool same_stage_required = r == "BotE-Alt" || mode_ == ClassicalMode::SameStage;
      if (same_stage_required && !(j.stage == a))
        fail(DerivationErrorKind::SideConditionFailure,
             "bot is derived at " + to_string(j.stage) + " but the conclusion is at " + to_string(a));
      return {without(j.context, {Type::negation(p), a}), a, p};
    }
    fail(DerivationErrorKind::RuleMismatch, "unknown rule '" + r + "'");
  }

  ClassicalMode mode_;
  std::vector<std::size_t> path_;
};

Transition transition_of(const json& j) {
  if (j.is_array()) {
    std::string s;
    for (const auto& x : j) s += x.get<std::string>() + " ";
    return parse_transition(s);
  }
  return parse_transition(j.get<std::string>());
}

std::string transition_text(const Transition& t) {
  std::string s;
  for (const auto& v : t) s += (s.empty() ? "" : " ") + v.name();
  return s;
}

Derivation derivation_of(const json& j) {
  Derivation d;
  d.rule = j.at("rule").get<std::string>();
  if (j.contains("prop")) d.prop = parse_type(j["prop"].get<std::string>());
  if (j.contains("stage")) d.stage = transition_of(j["stage"]);
  if (j.contains("var")) d.var = j["var"].get<std::string>();
  if (j.contains("instance")) d.instance = transition_of(j["instance"]);
  if (j.contains("premises"))
    for (const auto& p : j["premises"]) d.premises.push_back(derivation_of(p));
  if (j.contains("conclusion")) {
    const json& c = j["conclusion"];
    LogicJudgment lj{{}, transition_of(c.value("stage", json(""))), parse_type(c.at("prop").get<std::string>())};
    if (c.contains("context"))
      for (const auto& a : c["context"])
        lj.context.push_back({parse_type(a.at("prop").get<std::string>()), transition_of(a.value("stage", json("")))});
    d.conclusion = lj;
  }
  return d;
}

json json_of(const Derivation& d) {
  json j;
  j["rule"] = d.rule;
  if (d.prop) j["prop"] = prop_to_string(*d.prop);
  if (d.stage) j["stage"] = transition_text(*d.stage);
  if (d.var) j["var"] = *d.var;
  if (d.instance) j["instance"] = transition_text(*d.instance);
  if (!d.premises.empty()) {
    j["premises"] = json::array();
    for (const auto& p : d.premises) j["premises"].push_back(json_of(p));
  }
  if (d.conclusion) {
    json c;
    c["context"] = json::array();
    for (const auto& a : d.conclusion->context)
      c["context"].push_back({{"prop", prop_to_string(a.prop)}, {"stage", transition_text(a.stage)}});
    c["stage"] = transition_text(d.conclusion->stage);
    c["prop"] = prop_to_string(d.conclusion->prop);
    j["conclusion"] = c;
  }
  return j;
}

}  // namespace

LogicJudgment check_derivation(const Derivation& d, ClassicalMode mode) { return DerivationChecker(mode).check(d); }

Derivation parse_derivation(std::string_view text) {
  try {
    return derivation_of(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("derivation: ") + e.what(), 0, 0);
  }
}

std::string derivation_to_json(const Derivation& d) { return json_of(d).dump(2); }

std::string to_string(const LogicJudgment& j) {
  std::string s;
  for (const auto& a : j.context) s += (s.empty() ? "" : ", ") + prop_to_string(a.prop) + " @ " + to_string(a.stage);
  return s + (s.empty() ? "" : " ") + "|-" + (j.stage.empty() ? "" : "^" + to_string(j.stage)) + " " +
         prop_to_string(j.prop);
}

bool KripkeModel::holds(const std::string& p, std::size_t s) const {
  for (const auto& [name, row] : valuation)
    if (name == p) return row[s];
  return false;
}

KripkeModel parse_model(std::string_view text) {
  try {
    json j = json::parse(text);
    KripkeModel m;
    m.partial = j.value("mode", std::string("total")) == "partial";
    m.states = j.at("states").get<std::vector<std::string>>();
    if (m.states.empty()) throw ParseError("model: at least one state is required", 0, 0);
    m.labels = j.value("labels", std::vector<std::string>{});
    auto index = [&](const std::string& s) {
      auto it = std::find(m.states.begin(), m.states.end(), s);
      if (it == m.states.end()) throw ParseError("model: unknown state '" + s + "'", 0, 0);
      return static_cast<int>(it - m.states.begin());
    };
    const json& tr = j.value("transitions", json::object());
    for (const auto& l : m.labels) {
      std::vector<int> row(m.states.size(), -1);
      if (tr.contains(l)) {
        const json& r = tr[l];
        if (!r.is_array() || r.size() != m.states.size())
          throw ParseError("model: transitions for '" + l + "' must list one target per state", 0, 0);
        for (std::size_t i = 0; i < r.size(); ++i)
          if (!r[i].is_null()) row[i] = index(r[i].get<std::string>());
      }
      if (!m.partial && std::count(row.begin(), row.end(), -1))
        throw ParseError("model: label '" + l + "' is not total", 0, 0);
      m.transitions.push_back(row);
    }
    if (j.contains("valuation"))
      for (const auto& [p, states] : j["valuation"].items()) {
        std::vector<bool> row(m.states.size(), false);
        for (const auto& s : states) row[index(s.get<std::string>())] = true;
        m.valuation.push_back({p, row});
      }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: ") + e.what(), 0, 0);
  }
}

std::string model_to_json(const KripkeModel& m) {
  json j;
  j["mode"] = m.partial ? "partial" : "total";
  j["states"] = m.states;
  j["labels"] = m.labels;
  j["transitions"] = json::object();
  for (std::size_t l = 0; l < m.labels.size(); ++l) {
    json row = json::array();
    for (int t : m.transitions[l]) row.push_back(t < 0 ? json(nullptr) : json(m.states[static_cast<std::size_t>(t)]));
    j["transitions"][m.labels[l]] = row;
  }
  j["valuation"] = json::object();
  for (const auto& [p, row] : m.valuation) {
    json states = json::array();
    for (std::size_t s = 0; s < row.size(); ++s)
      if (row[s]) states.push_back(m.states[s]);
    j["valuation"][p] = states;
  }
  return j.dump(2);
}

std::vector<StateFn> transition_monoid(const KripkeModel& m) {
  StateFn id(m.states.size());
  for (std::size_t s = 0; s < id.size(); ++s) id[s] = static_cast<int>(s);
  std::vector<StateFn> out{id};
  std::set<StateFn> seen{id};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (const auto& a : m.transitions) {
      StateFn g(out[i].size());
      for (std::size_t s = 0; s < g.size(); ++s) g[s] = out[i][s] < 0 ? -1 : a[static_cast<std::size_t>(out[i][s])];
      if (seen.insert(g).second) out.push_back(g);
    }
  return out;
}

namespace {

class Satisfaction {
 public:
  Satisfaction(const KripkeModel& m, const std::vector<StateFn>& monoid, const TransValuation& rho)
      : m_(m), monoid_(monoid), rho_(rho) {}

  bool sat(std::size_t s, const Prop& p) {
    if (const auto* b = p.as<Type::Base>()) return m_.holds(b->name, s);
    if (p.is<Type::Int>()) return m_.holds("int", s);
    if (p.is<Type::Bool>()) return m_.holds("bool", s);
    if (p.is<Type::Bot>()) return false;
    if (const auto* a = p.as<Type::Arrow>()) return !sat(s, a->dom) || sat(s, a->cod);
    if (const auto* c = p.as<Type::Code>()) {
      int t = fn(c->var)[s];
      return t < 0 || sat(static_cast<std::size_t>(t), c->body);
    }
    const auto* f = p.as<Type::Forall>();
    for (const auto& g : monoid_) {
      bound_.push_back(&g);
      bool ok = sat(s, f->body);
      bound_.pop_back();
      if (!ok) return false;
    }
    return true;
  }

 private:
  const StateFn& fn(const TransitionVar& v) {
    if (v.is_bound()) return *bound_[bound_.size() - 1 - v.index()];
    for (const auto& [name, g] : rho_)
      if (name == v.name()) return g;
    throw UnboundTransitionVar("no value for transition variable " + v.name());
  }

  const KripkeModel& m_;
  const std::vector<StateFn>& monoid_;
  const TransValuation& rho_;
  std::vector<const StateFn*> bound_;
};

struct LocalProblem {
  std::vector<std::string> vars;
  std::vector<Prop> hyps;  // <A>phi for each assumption
  std::vector<StateFn> monoid;
  std::size_t cases = 0;
};

LocalProblem local_problem(const KripkeModel& m, const std::vector<Assumption>& ctx, const Prop& p) {
  LocalProblem lp;
  std::set<std::string> vars = fmv(p);
  for (const auto& v : context_fmv(ctx)) vars.insert(v);
  lp.vars.assign(vars.begin(), vars.end());
  for (const auto& a : ctx) lp.hyps.push_back(Type::code(a.stage, a.prop));
  lp.monoid = transition_monoid(m);
  lp.cases = m.states.size();
  for (std::size_t i = 0; i < lp.vars.size(); ++i) lp.cases *= lp.monoid.size();
  return lp;
}

bool check_case(const KripkeModel& m, const LocalProblem& lp, const Prop& p, std::size_t idx) {
  std::size_t s = idx % m.states.size();
  idx /= m.states.size();
  TransValuation rho;
  for (const auto& v : lp.vars) {
    rho.push_back({v, lp.monoid[idx % lp.monoid.size()]});
    idx /= lp.monoid.size();
  }
  Satisfaction sat(m, lp.monoid, rho);
  for (const auto& h : lp.hyps)
    if (!sat.sat(s, h)) return true;
  return sat.sat(s, p);
}

}  // namespace

bool satisfies(const KripkeModel& m, const std::vector<StateFn>& monoid, const TransValuation& rho, std::size_t s,
               const Prop& p) {
  return Satisfaction(m, monoid, rho).sat(s, p);
}

bool satisfies(const KripkeModel& m, const TransValuation& rho, std::size_t s, const Prop& p) {
  auto monoid = transition_monoid(m);
  return satisfies(m, monoid, rho, s, p);
}

bool holds_locally(const KripkeModel& m, const std::vector<Assumption>& ctx, const Prop& p) {
  LocalProblem lp = local_problem(m, ctx, p);
  const auto n = static_cast<std::int64_t>(lp.cases);
  bool ok = true;
#pragma omp parallel for reduction(&& : ok) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) ok = ok && check_case(m, lp, p, static_cast<std::size_t>(i));
  return ok;
}

bool holds_locally_serial(const KripkeModel& m, const std::vector<Assumption>& ctx, const Prop& p) {
  LocalProblem lp = local_problem(m, ctx, p);
  for (std::size_t i = 0; i < lp.cases; ++i)
    if (!check_case(m, lp, p, i)) return false;
  return true;
}

namespace {

class SequenceSatisfaction {
 public:
  using Seq = std::vector<std::size_t>;
  SequenceSatisfaction(const KripkeModel& m, const std::vector<std::pair<std::string, Seq>>& rho, std::size_t max_len)
      : m_(m), rho_(rho) {
    all_.push_back({});
    for (std::size_t i = 0; i < all_.size(); ++i)
      if (all_[i].size() < max_len)
        for (std::size_t l = 0; l < m.labels.size(); ++l) {
          Seq next = all_[i];
          next.push_back(l);
          all_.push_back(next);
        }
  }

  bool sat(std::size_t s, const Prop& p) {
    if (const auto* b = p.as<Type::Base>()) return m_.holds(b->name, s);
    if (p.is<Type::Bot>()) return false;
    if (const auto* a = p.as<Type::Arrow>()) return !sat(s, a->dom) || sat(s, a->cod);
    if (const auto* c = p.as<Type::Code>()) {
      int t = static_cast<int>(s);
      for (std::size_t l : seq(c->var)) {
        t = m_.transitions[l][static_cast<std::size_t>(t)];
        if (t < 0) return true;
      }
      return sat(static_cast<std::size_t>(t), c->body);
    }
    if (const auto* f = p.as<Type::Forall>()) {
      for (const auto& q : all_) {
        bound_.push_back(&q);
        bool ok = sat(s, f->body);
        bound_.pop_back();
        if (!ok) return false;
      }
      return true;
    }
    return m_.holds(p.is<Type::Int>() ? "int" : "bool", s);
  }

 private:
  const Seq& seq(const TransitionVar& v) {
    if (v.is_bound()) return *bound_[bound_.size() - 1 - v.index()];
    for (const auto& [name, q] : rho_)
      if (name == v.name()) return q;
    throw UnboundTransitionVar("no value for transition variable " + v.name());
  }

  const KripkeModel& m_;
  const std::vector<std::pair<std::string, Seq>>& rho_;
  std::vector<Seq> all_;
  std::vector<const Seq*> bound_;
};

}  // namespace

bool satisfies_by_sequences(const KripkeModel& m,
                            const std::vector<std::pair<std::string, std::vector<std::size_t>>>& rho, std::size_t s,
                            const Prop& p, std::size_t max_len) {
  return SequenceSatisfaction(m, rho, max_len).sat(s, p);
}

KripkeModel random_model(std::size_t state_count, std::size_t label_count, bool partial, std::uint64_t seed,
                         const std::vector<std::string>& props) {
  std::mt19937_64 rng(seed);
  KripkeModel m;
  m.partial = partial;
  for (std::size_t i = 0; i < state_count; ++i) m.states.push_back("s" + std::to_string(i));
  for (std::size_t l = 0; l < label_count; ++l)
    m.labels.push_back(l < 26 ? std::string(1, static_cast<char>('a' + l)) : "l" + std::to_string(l));
  std::uniform_int_distribution<int> target(0, static_cast<int>(state_count) - 1);
  std::bernoulli_distribution undefined(0.3);
  std::bernoulli_distribution truth(0.5);
  for (std::size_t l = 0; l < label_count; ++l) {
    std::vector<int> row(state_count);
    for (auto& t : row) t = partial && undefined(rng) ? -1 : target(rng);
    m.transitions.push_back(row);
  }
  for (const auto& p : props) {
    std::vector<bool> row(state_count);
    for (std::size_t s = 0; s < state_count; ++s) row[s] = truth(rng);
    m.valuation.push_back({p, row});
  }
  return m;
}

namespace {

class PropGenerator {
 public:
  PropGenerator(std::uint64_t seed, std::vector<std::string> vars, std::size_t max_quantifiers)
      : rng_(seed), vars_(std::move(vars)), quantifiers_(max_quantifiers) {}

  Prop gen(std::size_t size) {
    if (size <= 1) return atom();
    std::size_t choice = pick(vars_.empty() ? 2 : 4);
    if (choice < 2) {
      std::size_t left = 1 + pick(size - 1);
      Prop l = gen(left);
      return Type::arrow(l, gen(size - left));
    }
    if (choice == 3 && quantifiers_ > 0) {
      std::string v = "q" + std::to_string(fresh_++);
      --quantifiers_;
      vars_.push_back(v);
      Prop body = gen(size - 1);
      vars_.pop_back();
      ++quantifiers_;
      return Type::forall("a", abstract(body, v));
    }
    return Type::code(TransitionVar::free(vars_[pick(vars_.size())]), gen(size - 1));
  }

 private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  Prop atom() {
    static const char* names[] = {"p", "q", "r"};
    std::size_t k = pick(4);
    return k == 3 ? Type::bot() : Type::base(names[k]);
  }

  std::mt19937_64 rng_;
  std::vector<std::string> vars_;
  std::size_t quantifiers_;
  std::size_t fresh_ = 0;
};

}  // namespace

Prop random_prop(std::uint64_t seed, std::size_t size, const std::vector<std::string>& free_vars,
                 std::size_t max_quantifiers) {
  return PropGenerator(seed, free_vars, max_quantifiers).gen(size);
}

}  // namespace stagecraft
