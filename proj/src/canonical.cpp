#include "refnorm/canonical.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace refnorm {

Conj c_true() { return Conj{TypeSetConj{TypeSet::all()}}; }

Conj c_fresh(JsonType t) {
  switch (t) {
    case JsonType::Null: return Conj{NullConj{}};
    case JsonType::Boolean: return Conj{BoolConj{}};
    case JsonType::Number: return Conj{NumberConj{}};
    case JsonType::String: return Conj{StringConj{}};
    case JsonType::Array: return Conj{ArrayConj{}};
    case JsonType::Object: return Conj{ObjectConj{}};
  }
  throw std::logic_error("bad type");
}

Dnf any_dd(Dnf a, Dnf b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::unordered_set<std::string> seen;
  for (auto& c : a) seen.insert(describe(c));
  for (auto& c : b)
    if (seen.insert(describe(c)).second) a.push_back(std::move(c));
  return a;
}

namespace {

std::string bound(const std::optional<NumBound>& b, bool lower) {
  if (!b) return lower ? "-inf" : "+inf";
  return (lower ? (b->strict ? "(" : "[") : "") + b->v.to_string() + (lower ? "" : (b->strict ? ")" : "]"));
}

std::string crefs(const std::vector<CRef>& cs) {
  std::string s = "[";
  for (std::size_t i = 0; i < cs.size(); ++i) s += (i ? "," : "") + cs[i].to_string();
  return s + "]";
}

}  // namespace

std::string describe(const Conj& c) {
  return std::visit(
      [](auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TypeSetConj>) {
          std::string s = "CTS{";
          auto ms = x.types.members();
          for (std::size_t i = 0; i < ms.size(); ++i) s += (i ? "," : "") + std::string(type_name(ms[i]));
          return s + "}";
        } else if constexpr (std::is_same_v<T, NullConj>) {
          return "CZ";
        } else if constexpr (std::is_same_v<T, BoolConj>) {
          return x.value ? std::string("CB(") + (*x.value ? "true" : "false") + ")" : "CB";
        } else if constexpr (std::is_same_v<T, NumberConj>) {
          std::string s = "CN{" + bound(x.lo, true) + ".." + bound(x.hi, false);
          if (x.mult) s += " mult " + x.mult->to_string();
          for (auto& m : x.not_mult) s += " notMult " + m.to_string();
          return s + "}";
        } else if constexpr (std::is_same_v<T, StringConj>) {
          return "CS{" + to_string(x.pattern) + "}";
        } else if constexpr (std::is_same_v<T, ArrayConj>) {
          std::string s = "CA{items " + crefs(x.items) + " add " + x.additional.to_string();
          for (auto& [i, r] : x.contains) s += " contains@" + std::to_string(i) + " " + r.to_string();
          s += " len " + std::to_string(x.min_its) + ".." + (x.max_its ? std::to_string(*x.max_its) : "inf");
          if (x.unique) s += " unique";
          if (x.not_unique) s += " notUnique";
          return s + "}";
        } else {
          std::string s = "CO{";
          for (auto& f : x.frags) s += "(" + to_string(f.pattern) + ": " + f.pref.to_string() + " req " + crefs(f.reqs) + ") ";
          s += "props " + std::to_string(x.min_props) + ".." + (x.max_props ? std::to_string(*x.max_props) : "inf");
          return s + "}";
        }
      },
      c.data);
}

std::string describe(const Dnf& d) {
  if (d.empty()) return "dFalse";
  std::string s;
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? " | " : "") + describe(d[i]);
  return s;
}

namespace {

CRef negate_cref(const CRef& x, Env& env) {
  if (x.is_true()) return env.x_false();
  if (x == env.x_false()) return CRef();
  if (x.singleton()) return CRef(x.members()[0].flipped());
  throw std::logic_error("negating a multi-member c-ref in a structural position");
}

const CRef& child_ref(const Schema& s) {
  if (s->kids[0]->op != Op::Ref) throw std::logic_error("unstratified structural child: " + to_string(s));
  return s->kids[0]->ref;
}

Schema guard(JsonType t, Schema s) { return s_all({s_type(t), std::move(s)}); }

}  // namespace

Schema not_push(const Schema& s, Env& env) {
  switch (s->op) {
    case Op::Type: {
      TypeSet c = s->types.complement();
      return c.empty() ? s_false() : s_type(c);
    }
    case Op::Const: return s_not_const(s->value);
    case Op::NotConst: return s_const(s->value);
    case Op::Ref: {
      const CRef& x = s->ref;
      if (x.is_true() || x == env.x_false() || x.singleton()) return s_ref(negate_cref(x, env));
      std::vector<Schema> alts;
      for (auto& r : x.members()) alts.push_back(s_ref(CRef(r.flipped())));
      return s_any(std::move(alts));
    }
    case Op::True: return s_false();
    case Op::False: return s_true();
    case Op::AllOf:
    case Op::AnyOf: {
      std::vector<Schema> ns;
      for (auto& k : s->kids) ns.push_back(s_not(k));
      return s->op == Op::AllOf ? s_any(std::move(ns)) : s_all(std::move(ns));
    }
    case Op::OneOf: return not_push(expand_oneof(s), env);
    case Op::Not: return s->kids[0];
    case Op::PProp: return guard(JsonType::Object, s_preq(s->pattern, s_ref(negate_cref(child_ref(s), env))));
    case Op::PReq: return guard(JsonType::Object, s_pprop(s->pattern, s_ref(negate_cref(child_ref(s), env))));
    case Op::MinProps: return s->n == 0 ? s_false() : guard(JsonType::Object, s_max_props(s->n - 1));
    case Op::MaxProps: return guard(JsonType::Object, s_min_props(s->n + 1));
    case Op::Item:
      return s_all({s_type(JsonType::Array), s_item(s->n, s_ref(negate_cref(child_ref(s), env))), s_min_its(s->n + 1)});
    case Op::AdditionalItems: return guard(JsonType::Array, s_contains(s->n, s_ref(negate_cref(child_ref(s), env))));
    case Op::ContainsAfter: return guard(JsonType::Array, s_additional(s->n, s_ref(negate_cref(child_ref(s), env))));
    case Op::MinIts: return s->n == 0 ? s_false() : guard(JsonType::Array, s_max_its(s->n - 1));
    case Op::MaxIts: return guard(JsonType::Array, s_min_its(s->n + 1));
    case Op::UniqueIts: return guard(JsonType::Array, s_not_unique());
    case Op::NotUniqueIts: return guard(JsonType::Array, s_unique());
    case Op::Minimum: return guard(JsonType::Number, s_ex_max(s->q));
    case Op::ExMin: return guard(JsonType::Number, s_maximum(s->q));
    case Op::Maximum: return guard(JsonType::Number, s_ex_min(s->q));
    case Op::ExMax: return guard(JsonType::Number, s_minimum(s->q));
    case Op::MultipleOf: return guard(JsonType::Number, s_not_multiple_of(s->q));
    case Op::NotMultipleOf: return guard(JsonType::Number, s_multiple_of(s->q));
    case Op::Pattern: return guard(JsonType::String, s_pattern(p_not(s->pattern)));
  }
  throw std::logic_error("not_push: unknown operator");
}

namespace {

Schema rebuild(const Schema& s, std::vector<Schema> kids) {
  auto n = std::make_shared<SchemaNode>(*s);
  n->kids = std::move(kids);
  // recompute the hash through a constructor of the same shape
  switch (s->op) {
    case Op::AllOf: return s_all(std::move(n->kids));
    case Op::AnyOf: return s_any(std::move(n->kids));
    case Op::OneOf: return s_one(std::move(n->kids));
    case Op::Not: return s_not(n->kids[0]);
    case Op::PProp: return s_pprop(s->pattern, n->kids[0]);
    case Op::PReq: return s_preq(s->pattern, n->kids[0]);
    case Op::Item: return s_item(s->n, n->kids[0]);
    case Op::AdditionalItems: return s_additional(s->n, n->kids[0]);
    case Op::ContainsAfter: return s_contains(s->n, n->kids[0]);
    default: return s;
  }
}

}  // namespace

Schema expand_oneof(const Schema& s) {
  if (s->kids.empty()) return s;
  std::vector<Schema> kids;
  bool changed = false;
  for (auto& k : s->kids) {
    kids.push_back(expand_oneof(k));
    changed |= kids.back() != k;
  }
  if (s->op == Op::OneOf) {
    if (kids.size() == 1) return kids[0];
    std::vector<Schema> alts;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      std::vector<Schema> parts{kids[i]};
      for (std::size_t j = 0; j < kids.size(); ++j)
        if (j != i) parts.push_back(s_not(kids[j]));
      alts.push_back(s_all(std::move(parts)));
    }
    return s_any(std::move(alts));
  }
  return changed ? rebuild(s, std::move(kids)) : s;
}

void expand_oneof(Document& doc) {
  doc.root = expand_oneof(doc.root);
  for (auto& [uri, body] : doc.env.bindings()) body = expand_oneof(body);
}

namespace {

class Stratifier {
 public:
  explicit Stratifier(Env& env) : env_(env) {
    env_.x1();  // pin the designated name before fresh ones appear
    for (auto& [u, b] : env_.bindings()) taken_.insert(u);
  }

  Schema run(const Schema& s) {
    if (s->kids.empty()) return s;
    std::vector<Schema> kids;
    bool changed = false;
    for (auto& k : s->kids) {
      Schema nk = is_structural(s->op) ? as_ref(k) : run(k);
      changed |= nk != k;
      kids.push_back(nk);
    }
    return changed ? rebuild(s, std::move(kids)) : s;
  }

 private:
  Env& env_;
  std::unordered_map<Schema, std::string, SchemaHash, SchemaEq> fresh_;
  std::unordered_set<std::string> taken_;
  std::uint64_t counter_ = 0;

  Schema as_ref(const Schema& k) {
    if (k->op == Op::Ref) return k;
    if (k->op == Op::True) return s_ref(CRef());
    if (k->op == Op::False) return s_ref(env_.x_false());
    Schema body = run(k);
    auto it = fresh_.find(body);
    if (it != fresh_.end()) return s_ref(it->second);
    std::string uri;
    do {
      uri = "$s" + std::to_string(++counter_);
    } while (taken_.count(uri));
    taken_.insert(uri);
    env_.bind(uri, body);
    fresh_.emplace(body, uri);
    return s_ref(uri);
  }
};

}  // namespace

void stratify(Document& doc) {
  Stratifier st(doc.env);
  doc.root = st.run(doc.root);
  std::vector<std::string> uris;
  for (auto& [u, b] : doc.env.bindings()) uris.push_back(u);
  // fresh bindings are already stratified; only original ones need a pass
  for (auto& u : uris) {
    if (u.rfind("$s", 0) == 0) continue;
    Schema b = doc.env.bindings()[u];
    doc.env.bind(u, st.run(b));
  }
}

std::vector<std::string> check_invariants(const Conj& c, const CRef& x_false) {
  std::vector<std::string> bad;
  if (auto* o = std::get_if<ObjectConj>(&c.data)) {
    std::vector<Pattern> ps;
    for (auto& f : o->frags) {
      ps.push_back(f.pattern);
      if (p_is_empty(f.pattern)) bad.push_back("empty fragment " + to_string(f.pattern));
      for (auto& r : f.reqs) {
        if (r == x_false) bad.push_back("xFalse requirement");
        for (auto& m : f.pref.members())
          if (!std::binary_search(r.members().begin(), r.members().end(), m))
            bad.push_back("requirement not internalized: " + r.to_string());
      }
    }
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j)
        if (!p_disjoint(ps[i], ps[j])) bad.push_back("overlapping fragments");
    if (!p_equal(p_any(ps), p_true())) bad.push_back("fragments do not cover all names");
    if (o->max_props && *o->max_props < o->min_props) bad.push_back("props bounds crossed");
  }
  if (auto* a = std::get_if<ArrayConj>(&c.data)) {
    for (auto& [i, r] : a->contains) {
      if (i < a->items.size()) bad.push_back("contains below the additional start");
      for (auto& m : a->additional.members())
        if (!std::binary_search(r.members().begin(), r.members().end(), m)) bad.push_back("contains not internalized");
    }
    if (a->max_its && *a->max_its < a->min_its) bad.push_back("length bounds crossed");
    if (a->unique && a->not_unique) bad.push_back("unique and notUnique");
  }
  return bad;
}

}  // namespace refnorm
