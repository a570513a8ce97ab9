#include "refnorm/engine.hpp"

#include <pthread.h>

#include <algorithm>
#include <chrono>
#include <exception>
#include <set>

#include "refnorm/canonical.hpp"
#include "refnorm/witness.hpp"

namespace refnorm {

namespace {

bool sat_ref(const JsonValue& j, const CRef& r, const Env& env) {
  if (r.has_complementary_pair()) return false;
  for (auto& m : r.members())
    if (!satisfies(j, env.body(m), env)) return false;
  return true;
}

bool all_unique(const JsonValue::Array& a) {
  std::vector<const JsonValue*> v;
  v.reserve(a.size());
  for (auto& x : a) v.push_back(&x);
  std::sort(v.begin(), v.end(), [](auto* x, auto* y) { return *x < *y; });
  for (std::size_t i = 1; i < v.size(); ++i)
    if (*v[i - 1] == *v[i]) return false;
  return true;
}

}  // namespace

bool satisfies(const JsonValue& j, const Schema& s, const Env& env) {
  switch (s->op) {
    case Op::Type: return s->types.has(j.type());
    case Op::Const: return j == s->value;
    case Op::NotConst: return !(j == s->value);
    case Op::Ref: return sat_ref(j, s->ref, env);
    case Op::True: return true;
    case Op::False: return false;
    case Op::AllOf:
      return std::all_of(s->kids.begin(), s->kids.end(), [&](auto& k) { return satisfies(j, k, env); });
    case Op::AnyOf:
      return std::any_of(s->kids.begin(), s->kids.end(), [&](auto& k) { return satisfies(j, k, env); });
    case Op::OneOf: {
      int hits = 0;
      for (auto& k : s->kids)
        if (satisfies(j, k, env) && ++hits > 1) return false;
      return hits == 1;
    }
    case Op::Not: return !satisfies(j, s->kids[0], env);
    case Op::PProp:
      if (!j.is_object()) return true;
      for (auto& [k, v] : j.as_object())
        if (p_contains(s->pattern, std::string_view(k)) && !satisfies(v, s->kids[0], env)) return false;
      return true;
    case Op::PReq:
      if (!j.is_object()) return true;
      for (auto& [k, v] : j.as_object())
        if (p_contains(s->pattern, std::string_view(k)) && satisfies(v, s->kids[0], env)) return true;
      return false;
    case Op::MinProps: return !j.is_object() || j.as_object().size() >= s->n;
    case Op::MaxProps: return !j.is_object() || j.as_object().size() <= s->n;
    case Op::Item:
      if (!j.is_array() || j.as_array().size() <= s->n) return true;
      return satisfies(j.as_array()[s->n], s->kids[0], env);
    case Op::AdditionalItems:
      if (!j.is_array()) return true;
      for (std::size_t i = s->n; i < j.as_array().size(); ++i)
        if (!satisfies(j.as_array()[i], s->kids[0], env)) return false;
      return true;
    case Op::ContainsAfter:
      if (!j.is_array()) return true;
      for (std::size_t i = s->n; i < j.as_array().size(); ++i)
        if (satisfies(j.as_array()[i], s->kids[0], env)) return true;
      return false;
    case Op::MinIts: return !j.is_array() || j.as_array().size() >= s->n;
    case Op::MaxIts: return !j.is_array() || j.as_array().size() <= s->n;
    case Op::UniqueIts: return !j.is_array() || all_unique(j.as_array());
    case Op::NotUniqueIts: return !j.is_array() || !all_unique(j.as_array());
    case Op::Minimum: return !j.is_number() || j.as_number() >= s->q;
    case Op::ExMin: return !j.is_number() || j.as_number() > s->q;
    case Op::Maximum: return !j.is_number() || j.as_number() <= s->q;
    case Op::ExMax: return !j.is_number() || j.as_number() < s->q;
    case Op::MultipleOf: return !j.is_number() || j.as_number().is_multiple_of(s->q);
    case Op::NotMultipleOf: return !j.is_number() || !j.as_number().is_multiple_of(s->q);
    case Op::Pattern: return !j.is_string() || p_contains(s->pattern, std::string_view(j.as_string()));
  }
  return false;
}

bool satisfies(const JsonValue& j, const Document& doc) { return satisfies(j, doc.root, doc.env); }

namespace {

bool sat_number(const Decimal& x, const NumberConj& n) {
  if (n.lo && (x < n.lo->v || (n.lo->strict && x == n.lo->v))) return false;
  if (n.hi && (x > n.hi->v || (n.hi->strict && x == n.hi->v))) return false;
  if (n.mult && !x.is_multiple_of(*n.mult)) return false;
  for (auto& nm : n.not_mult)
    if (x.is_multiple_of(nm)) return false;
  return true;
}

bool sat_array(const JsonValue::Array& a, const ArrayConj& c, const Env& env) {
  if (a.size() < c.min_its || (c.max_its && a.size() > *c.max_its)) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!sat_ref(a[i], i < c.items.size() ? c.items[i] : c.additional, env)) return false;
  for (auto& [from, y] : c.contains) {
    bool found = false;
    for (std::size_t i = from; i < a.size() && !found; ++i) found = sat_ref(a[i], y, env);
    if (!found) return false;
  }
  if (c.unique && !all_unique(a)) return false;
  if (c.not_unique && all_unique(a)) return false;
  return true;
}

bool sat_object(const JsonValue::Object& o, const ObjectConj& c, const Env& env) {
  if (o.size() < c.min_props || (c.max_props && o.size() > *c.max_props)) return false;
  for (auto& f : c.frags) {
    for (auto& [k, v] : o)
      if (p_contains(f.pattern, std::string_view(k)) && !sat_ref(v, f.pref, env)) return false;
    for (auto& r : f.reqs) {
      bool found = false;
      for (auto it = o.begin(); it != o.end() && !found; ++it)
        found = p_contains(f.pattern, std::string_view(it->first)) && sat_ref(it->second, r, env);
      if (!found) return false;
    }
  }
  return true;
}

}  // namespace

bool satisfies(const JsonValue& j, const Conj& c, const Env& env) {
  if (auto* ts = std::get_if<TypeSetConj>(&c.data)) return ts->types.has(j.type());
  if (j.type() != c.type()) return false;
  switch (j.type()) {
    case JsonType::Null: return true;
    case JsonType::Boolean: {
      auto& b = std::get<BoolConj>(c.data);
      return !b.value || *b.value == j.as_bool();
    }
    case JsonType::Number: return sat_number(j.as_number(), std::get<NumberConj>(c.data));
    case JsonType::String: return p_contains(std::get<StringConj>(c.data).pattern, std::string_view(j.as_string()));
    case JsonType::Array: return sat_array(j.as_array(), std::get<ArrayConj>(c.data), env);
    case JsonType::Object: return sat_object(j.as_object(), std::get<ObjectConj>(c.data), env);
  }
  return false;
}

bool satisfies(const JsonValue& j, const Dnf& d, const Env& env) {
  return std::any_of(d.begin(), d.end(), [&](const Conj& c) { return satisfies(j, c, env); });
}

SchemaPair combine(const JsonValue& left, const JsonValue& right) {
  Document l = parse_schema(left, {"L", true});
  Document r = parse_schema(right, {"R", true});
  SchemaPair p{std::move(l.env), l.root, r.root};
  for (auto& [uri, body] : r.env.bindings()) p.env.bind(uri, body);
  return p;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Included: return "Included";
    case Verdict::NotIncluded: return "NotIncluded";
    case Verdict::Error: return "Error";
  }
  return "?";
}

const char* equivalence_name(Equivalence e) {
  switch (e) {
    case Equivalence::Equivalent: return "Equivalent";
    case Equivalence::LeftNotInRight: return "LeftNotInRight";
    case Equivalence::RightNotInLeft: return "RightNotInLeft";
    case Equivalence::Incomparable: return "Incomparable";
    case Equivalence::Error: return "Error";
  }
  return "?";
}

void run_with_stack(const std::function<void()>& fn, std::size_t bytes) {
  struct Job {
    const std::function<void()>* fn;
    std::exception_ptr err;
  } job{&fn, nullptr};
  auto body = [](void* p) -> void* {
    auto* jb = static_cast<Job*>(p);
    try {
      (*jb->fn)();
    } catch (...) {
      jb->err = std::current_exception();
    }
    return nullptr;
  };
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, bytes);
  pthread_t th;
  int rc = pthread_create(&th, &attr, body, &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    fn();  // could not spawn; run inline
    return;
  }
  pthread_join(th, nullptr);
  if (job.err) std::rethrow_exception(job.err);
}

namespace {

InclusionResult run_check(const Env& env, const Schema& s1, const Schema& s2, const Budget& budget) {
  InclusionResult res;
  Document d{env, s_all({s1, s_not(s2)})};
  expand_oneof(d);
  stratify(d);
  d.env.not_complete();
  NormContext ctx(d.env, budget);
  try {
    Dnf root = ctx.all_cs(c_true(), d.root);
    if (root.empty()) {
      res.verdict = Verdict::Included;
    } else {
      res.generation_invoked = true;
      Generator gen(ctx);
      std::optional<JsonValue> w = gen.generate(root);
      if (!w) {
        res.verdict = Verdict::Included;
      } else if (satisfies(*w, s1, env) && !satisfies(*w, s2, env)) {
        res.verdict = Verdict::NotIncluded;
        res.witness = std::move(w);
      } else {
        res.error = "internal: generated counterexample failed validation: " + dump_json(*w, -1);
      }
    }
  } catch (const Error& e) {
    res.error_kind = e.kind();
    res.error = e.what();
  }
  res.stats = ctx.stats();
  return res;
}

}  // namespace

InclusionResult check_inclusion(const Env& env, const Schema& s1, const Schema& s2, const Budget& budget) {
  auto t0 = std::chrono::steady_clock::now();
  InclusionResult res;
  try {
    run_with_stack([&] { res = run_check(env, s1, s2, budget); });
  } catch (const Error& e) {
    res = {};
    res.error_kind = e.kind();
    res.error = e.what();
  } catch (const std::exception& e) {
    res = {};
    res.error = std::string("internal: ") + e.what();
  }
  res.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

InclusionResult check_inclusion(const JsonValue& left, const JsonValue& right, const Budget& budget) {
  SchemaPair p;
  try {
    p = combine(left, right);
  } catch (const Error& e) {
    InclusionResult res;
    res.error_kind = e.kind();
    res.error = e.what();
    return res;
  }
  return check_inclusion(p.env, p.left, p.right, budget);
}

EquivalenceResult check_equivalence(const Env& env, const Schema& s1, const Schema& s2, const Budget& budget) {
  EquivalenceResult r;
  r.left_in_right = check_inclusion(env, s1, s2, budget);
  r.right_in_left = check_inclusion(env, s2, s1, budget);
  Verdict a = r.left_in_right.verdict, b = r.right_in_left.verdict;
  if (a == Verdict::Error || b == Verdict::Error) {
    r.verdict = Equivalence::Error;
  } else if (a == Verdict::Included && b == Verdict::Included) {
    r.verdict = Equivalence::Equivalent;
  } else if (a == Verdict::Included) {
    r.verdict = Equivalence::RightNotInLeft;
  } else if (b == Verdict::Included) {
    r.verdict = Equivalence::LeftNotInRight;
  } else {
    r.verdict = Equivalence::Incomparable;
  }
  return r;
}

EquivalenceResult check_equivalence(const JsonValue& left, const JsonValue& right, const Budget& budget) {
  SchemaPair p;
  try {
    p = combine(left, right);
  } catch (const Error& e) {
    EquivalenceResult r;
    r.left_in_right.error_kind = e.kind();
    r.left_in_right.error = e.what();
    r.right_in_left = r.left_in_right;
    return r;
  }
  return check_equivalence(p.env, p.left, p.right, budget);
}

namespace {

enum class Emit { Keep, Drop, Stop };

// Layered enumeration. `emit` sees every value in order and decides whether
// it joins the pool that children of the next layer are drawn from.
void enumerate_layers(const UniverseParams& u, const std::function<Emit(JsonValue&&)>& emit) {
  std::vector<JsonValue> pool;
  std::size_t seen = 0;
  bool stop = false;
  auto offer = [&](JsonValue v, std::vector<JsonValue>& next) {
    if (++seen > u.cap) throw Error(ErrorKind::UniverseTooLarge, "more than " + std::to_string(u.cap) + " values");
    JsonValue copy = v;
    Emit e = emit(std::move(v));
    if (e == Emit::Stop) stop = true;
    if (e == Emit::Keep) next.push_back(std::move(copy));
  };
  {
    std::vector<JsonValue> first;
    std::vector<JsonValue> scalars{nullptr, false, true};
    for (auto& n : u.numbers) scalars.emplace_back(n);
    for (auto& s : u.strings) scalars.emplace_back(s);
    for (auto& v : scalars) {
      offer(std::move(v), first);
      if (stop) return;
    }
    pool = std::move(first);
  }
  std::size_t layer_begin = 0;
  for (int depth = 1; depth <= u.max_depth; ++depth) {
    // a container belongs to this layer iff some child came from the last one
    const std::size_t lower = pool.size();
    auto fresh = [&](std::size_t i) { return i >= layer_begin && i < lower; };
    std::vector<JsonValue> next;
    std::vector<std::size_t> idx;
    for (std::size_t len = 0; len <= u.max_width && !stop; ++len) {
      idx.assign(len, 0);
      for (;;) {
        if (len == 0 ? depth == 1 : std::any_of(idx.begin(), idx.end(), fresh)) {
          JsonValue::Array a;
          for (auto i : idx) a.push_back(pool[i]);
          offer(std::move(a), next);
          if (stop) return;
        }
        std::size_t p = 0;
        while (p < len && ++idx[p] == lower) idx[p++] = 0;
        if (p == len) break;
      }
    }
    // digit 0 marks an absent key, digit i+1 binds value i
    const std::size_t nk = u.keys.size();
    const std::size_t nf = u.filler_keys.size();
    std::vector<std::size_t> fill;  // non-decreasing pool indices
    auto objects = [&](auto& self, std::size_t used, bool any_fresh) -> void {
      if (stop) return;
      if (any_fresh || (depth == 1 && used == 0)) {
        JsonValue::Object o;
        for (std::size_t k = 0; k < nk; ++k)
          if (idx[k] > 0) o.emplace(u.keys[k], pool[idx[k] - 1]);
        for (std::size_t f = 0; f < fill.size(); ++f) o.emplace(u.filler_keys[f], pool[fill[f]]);
        offer(std::move(o), next);
      }
      if (fill.size() == nf || used >= u.max_props) return;
      for (std::size_t i = fill.empty() ? 0 : fill.back(); i < lower && !stop; ++i) {
        fill.push_back(i);
        self(self, used + 1, any_fresh || fresh(i));
        fill.pop_back();
      }
    };
    idx.assign(nk, 0);
    for (;;) {
      std::size_t used = std::count_if(idx.begin(), idx.end(), [](std::size_t d) { return d > 0; });
      if (used <= u.max_props) {
        bool any_fresh = std::any_of(idx.begin(), idx.end(), [&](std::size_t d) { return d > 0 && fresh(d - 1); });
        objects(objects, used, any_fresh);
        if (stop) return;
      }
      std::size_t p = 0;
      while (p < nk && ++idx[p] == lower + 1) idx[p++] = 0;
      if (p == nk) break;
    }
    layer_begin = lower;
    for (auto& v : next) pool.push_back(std::move(v));
  }
}

void collect_nodes(const Schema& s, std::vector<const SchemaNode*>& out, std::set<const SchemaNode*>& seen) {
  if (!seen.insert(s.get()).second) return;
  out.push_back(s.get());
  for (auto& k : s->kids) collect_nodes(k, out, seen);
}

}  // namespace

std::vector<JsonValue> enumerate_universe(const UniverseParams& u) {
  std::vector<JsonValue> all;
  enumerate_layers(u, [&](JsonValue&& v) {
    all.push_back(v);
    return Emit::Keep;
  });
  return all;
}

void for_each_profile_value(const UniverseParams& u, const std::vector<Schema>& roots,
                            const std::vector<const Env*>& envs, const std::function<bool(const JsonValue&)>& fn) {
  std::vector<const SchemaNode*> nodes;
  std::set<const SchemaNode*> seen;
  for (auto& r : roots) collect_nodes(r, nodes, seen);
  for (auto* e : envs)
    for (auto& [uri, body] : e->bindings()) collect_nodes(body, nodes, seen);
  bool quotient = u.quotient && std::none_of(nodes.begin(), nodes.end(), [](const SchemaNode* n) {
    return n->op == Op::UniqueIts || n->op == Op::NotUniqueIts;
  });
  // non-owning aliases, the nodes stay alive through roots and envs
  std::vector<Schema> subs;
  for (auto* n : nodes) subs.push_back(Schema(Schema{}, n));
  static const Env empty;
  std::vector<const Env*> under = envs;
  if (under.empty()) under.push_back(&empty);
  std::set<std::vector<bool>> profiles;
  enumerate_layers(u, [&](JsonValue&& j) {
    if (!fn(j)) return Emit::Stop;
    if (!quotient) return Emit::Keep;
    std::vector<bool> prof;
    prof.reserve(subs.size() * under.size());
    for (auto& s : subs)
      for (auto* e : under) {
        // a node read under an env that lacks its refs
        try {
          prof.push_back(satisfies(j, s, *e));
        } catch (const Error&) {
          prof.push_back(false);
        }
      }
    return profiles.insert(std::move(prof)).second ? Emit::Keep : Emit::Drop;
  });
}

OracleResult oracle_included(const Schema& s1, const Schema& s2, const Env& env, const UniverseParams& u) {
  OracleResult r;
  for_each_profile_value(u, {s1, s2}, {&env}, [&](const JsonValue& j) {
    if (satisfies(j, s1, env) && !satisfies(j, s2, env)) {
      r.included = false;
      r.counterexample = j;
      return false;
    }
    return true;
  });
  return r;
}

namespace {

void collect_patterns(const Schema& s, std::vector<Pattern>& out, std::set<const PatternNode*>& seen) {
  if (s->pattern && seen.insert(s->pattern).second) out.push_back(s->pattern);
  for (auto& k : s->kids) collect_patterns(k, out, seen);
}

}  // namespace

std::vector<std::string> probe_strings(const std::vector<Schema>& roots, const Env& env) {
  std::vector<Pattern> pats;
  std::set<const PatternNode*> seen;
  for (auto& r : roots) collect_patterns(r, pats, seen);
  for (auto& [uri, body] : env.bindings()) collect_patterns(body, pats, seen);
  std::vector<std::string> out{""};
  auto add = [&](Pattern e) {
    if (auto s = p_example(e); s && std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
  };
  for (auto e : pats) {
    add(e);
    add(p_not(e));
  }
  for (std::size_t i = 0; i < pats.size(); ++i)
    for (std::size_t k = i + 1; k < pats.size(); ++k) {
      add(p_all({pats[i], pats[k]}));
      add(p_minus(pats[i], pats[k]));
      add(p_minus(pats[k], pats[i]));
    }
  add(p_not(p_any(pats)));
  return out;
}

}  // namespace refnorm
