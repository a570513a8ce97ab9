#include "refnorm/schema.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "refnorm/errors.hpp"

namespace refnorm {

std::vector<JsonType> TypeSet::members() const {
  std::vector<JsonType> r;
  for (int i = 0; i < kJsonTypeCount; ++i)
    if (bits_ & (1u << i)) r.push_back(static_cast<JsonType>(i));
  return r;
}

CRef::CRef(std::vector<RefName> ms) : m_(std::move(ms)) {
  std::sort(m_.begin(), m_.end());
  m_.erase(std::unique(m_.begin(), m_.end()), m_.end());
}

bool CRef::has_complementary_pair() const {
  for (std::size_t i = 0; i + 1 < m_.size(); ++i)
    if (m_[i].uri == m_[i + 1].uri) return true;  // sorted: x then x-bar
  return false;
}

CRef CRef::join(const CRef& o) const {
  if (o.m_.empty()) return *this;
  if (m_.empty()) return o;
  std::vector<RefName> u;
  u.reserve(m_.size() + o.m_.size());
  std::set_union(m_.begin(), m_.end(), o.m_.begin(), o.m_.end(), std::back_inserter(u));
  CRef r;
  r.m_ = std::move(u);
  return r;
}

std::size_t CRef::hash() const {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (auto& r : m_) {
    h ^= std::hash<std::string>{}(r.uri) + (r.neg ? 0x51ed27 : 0) + (h << 6) + (h >> 2);
  }
  return h;
}

std::string CRef::to_string() const {
  if (m_.empty()) return "{}";
  std::string s = "{";
  for (std::size_t i = 0; i < m_.size(); ++i) s += (i ? "," : "") + std::string(m_[i].neg ? "~" : "") + m_[i].uri;
  return s + "}";
}

namespace {

void mix(std::size_t& h, std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); }

std::shared_ptr<SchemaNode> node(Op op) {
  auto n = std::make_shared<SchemaNode>();
  n->op = op;
  return n;
}

Schema seal(std::shared_ptr<SchemaNode> n) {
  std::size_t h = static_cast<std::size_t>(n->op) * 0x100000001b3ULL;
  mix(h, n->types.bits());
  if (n->op == Op::Const || n->op == Op::NotConst) mix(h, n->value.hash());
  mix(h, n->ref.hash());
  for (auto& k : n->kids) mix(h, k->hash);
  if (n->pattern) mix(h, n->pattern->id);
  mix(h, n->n);
  mix(h, n->q.hash());
  n->hash = h;
  return n;
}

Schema leaf_n(Op op, std::uint64_t v) {
  auto n = node(op);
  n->n = v;
  return seal(n);
}
Schema leaf_q(Op op, Decimal q) {
  auto n = node(op);
  n->q = std::move(q);
  return seal(n);
}
Schema with_kid(Op op, std::uint64_t i, Schema s) {
  auto n = node(op);
  n->n = i;
  n->kids.push_back(std::move(s));
  return seal(n);
}
Schema list(Op op, std::vector<Schema> ss) {
  auto n = node(op);
  n->kids = std::move(ss);
  return seal(n);
}

}  // namespace

Schema s_type(TypeSet t) {
  auto n = node(Op::Type);
  n->types = t;
  return seal(n);
}
Schema s_type(JsonType t) { return s_type(TypeSet::of(t)); }
Schema s_const(JsonValue v) {
  auto n = node(Op::Const);
  n->value = std::move(v);
  return seal(n);
}
Schema s_not_const(JsonValue v) {
  auto n = node(Op::NotConst);
  n->value = std::move(v);
  return seal(n);
}
Schema s_ref(CRef r) {
  auto n = node(Op::Ref);
  n->ref = std::move(r);
  return seal(n);
}
Schema s_ref(const std::string& uri, bool neg) { return s_ref(CRef(RefName{uri, neg})); }
Schema s_true() {
  static const Schema t = seal(node(Op::True));
  return t;
}
Schema s_false() {
  static const Schema f = seal(node(Op::False));
  return f;
}
Schema s_all(std::vector<Schema> ss) { return list(Op::AllOf, std::move(ss)); }
Schema s_any(std::vector<Schema> ss) { return list(Op::AnyOf, std::move(ss)); }
Schema s_one(std::vector<Schema> ss) { return list(Op::OneOf, std::move(ss)); }
Schema s_not(Schema s) { return with_kid(Op::Not, 0, std::move(s)); }
Schema s_pprop(Pattern e, Schema s) {
  auto n = node(Op::PProp);
  n->pattern = e;
  n->kids.push_back(std::move(s));
  return seal(n);
}
Schema s_preq(Pattern e, Schema s) {
  auto n = node(Op::PReq);
  n->pattern = e;
  n->kids.push_back(std::move(s));
  return seal(n);
}
Schema s_min_props(std::uint64_t v) { return leaf_n(Op::MinProps, v); }
Schema s_max_props(std::uint64_t v) { return leaf_n(Op::MaxProps, v); }
Schema s_item(std::uint64_t i, Schema s) { return with_kid(Op::Item, i, std::move(s)); }
Schema s_additional(std::uint64_t i, Schema s) { return with_kid(Op::AdditionalItems, i, std::move(s)); }
Schema s_contains(std::uint64_t i, Schema s) { return with_kid(Op::ContainsAfter, i, std::move(s)); }
Schema s_min_its(std::uint64_t v) { return leaf_n(Op::MinIts, v); }
Schema s_max_its(std::uint64_t v) { return leaf_n(Op::MaxIts, v); }
Schema s_unique() { return seal(node(Op::UniqueIts)); }
Schema s_not_unique() { return seal(node(Op::NotUniqueIts)); }
Schema s_minimum(Decimal q) { return leaf_q(Op::Minimum, std::move(q)); }
Schema s_ex_min(Decimal q) { return leaf_q(Op::ExMin, std::move(q)); }
Schema s_maximum(Decimal q) { return leaf_q(Op::Maximum, std::move(q)); }
Schema s_ex_max(Decimal q) { return leaf_q(Op::ExMax, std::move(q)); }
Schema s_multiple_of(Decimal q) {
  if (q.sign() <= 0) throw Error(ErrorKind::MalformedSchema, "multipleOf must be positive");
  return leaf_q(Op::MultipleOf, std::move(q));
}
Schema s_not_multiple_of(Decimal q) {
  if (q.sign() <= 0) throw Error(ErrorKind::MalformedSchema, "multipleOf must be positive");
  return leaf_q(Op::NotMultipleOf, std::move(q));
}
Schema s_pattern(Pattern e) {
  auto n = node(Op::Pattern);
  n->pattern = e;
  return seal(n);
}

bool schema_equal(const Schema& a, const Schema& b) {
  if (a == b) return true;
  if (a->hash != b->hash || a->op != b->op || a->n != b->n || a->pattern != b->pattern) return false;
  if (!(a->types == b->types) || !(a->ref == b->ref) || !(a->q == b->q)) return false;
  if ((a->op == Op::Const || a->op == Op::NotConst) && !(a->value == b->value)) return false;
  if (a->kids.size() != b->kids.size()) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!schema_equal(a->kids[i], b->kids[i])) return false;
  return true;
}

std::size_t schema_size(const Schema& s) {
  std::size_t n = 1;
  for (auto& k : s->kids) n += schema_size(k);
  return n;
}

bool is_structural(Op op) {
  return op == Op::PProp || op == Op::PReq || op == Op::Item || op == Op::AdditionalItems || op == Op::ContainsAfter;
}

std::string to_string(const Schema& s) {
  auto kids = [&](const char* name) {
    std::string r = std::string(name) + "[";
    for (std::size_t i = 0; i < s->kids.size(); ++i) r += (i ? ", " : "") + to_string(s->kids[i]);
    return r + "]";
  };
  auto un = [&](const char* name) { return std::string(name) + "(" + std::to_string(s->n) + ")"; };
  auto num = [&](const char* name) { return std::string(name) + "(" + s->q.to_string() + ")"; };
  switch (s->op) {
    case Op::Type: {
      auto ms = s->types.members();
      if (ms.size() == 1) return std::string("type(") + type_name(ms[0]) + ")";
      std::string r = "typeSet[";
      for (std::size_t i = 0; i < ms.size(); ++i) r += (i ? "," : "") + std::string(type_name(ms[i]));
      return r + "]";
    }
    case Op::Const: return "const(" + dump_json(s->value, -1) + ")";
    case Op::NotConst: return "notConst(" + dump_json(s->value, -1) + ")";
    case Op::Ref: return "ref" + s->ref.to_string();
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::AllOf: return kids("allOf");
    case Op::AnyOf: return kids("anyOf");
    case Op::OneOf: return kids("oneOf");
    case Op::Not: return "not(" + to_string(s->kids[0]) + ")";
    case Op::PProp: return "pProp(" + to_string(s->pattern) + ", " + to_string(s->kids[0]) + ")";
    case Op::PReq: return "pReq(" + to_string(s->pattern) + ", " + to_string(s->kids[0]) + ")";
    case Op::MinProps: return un("minProps");
    case Op::MaxProps: return un("maxProps");
    case Op::Item: return "item(" + std::to_string(s->n) + ", " + to_string(s->kids[0]) + ")";
    case Op::AdditionalItems: return "additionalItems(" + std::to_string(s->n) + ", " + to_string(s->kids[0]) + ")";
    case Op::ContainsAfter: return "containsAfter(" + std::to_string(s->n) + ", " + to_string(s->kids[0]) + ")";
    case Op::MinIts: return un("minIts");
    case Op::MaxIts: return un("maxIts");
    case Op::UniqueIts: return "uniqueIts";
    case Op::NotUniqueIts: return "notUniqueIts";
    case Op::Minimum: return num("minimum");
    case Op::ExMin: return num("exMin");
    case Op::Maximum: return num("maximum");
    case Op::ExMax: return num("exMax");
    case Op::MultipleOf: return num("multipleOf");
    case Op::NotMultipleOf: return num("notMultipleOf");
    case Op::Pattern: return "pattern(" + to_string(s->pattern) + ")";
  }
  return "?";
}

void Env::bind(const std::string& uri, Schema body) {
  pos_[uri] = std::move(body);
  neg_.erase(uri);
}

Schema Env::body(const RefName& r) const {
  auto it = pos_.find(r.uri);
  if (it == pos_.end()) throw Error(ErrorKind::UnresolvableRef, r.uri);
  if (!r.neg) return it->second;
  auto jt = neg_.find(r.uri);
  return jt != neg_.end() ? jt->second : s_not(it->second);
}

Schema Env::body_of(const CRef& c) const {
  if (c.is_true()) return s_true();
  if (c.singleton()) return body(c.members()[0]);
  std::vector<Schema> parts;
  for (auto& r : c.members()) parts.push_back(body(r));
  return s_all(std::move(parts));
}

void Env::not_complete() {
  for (auto& [uri, b] : pos_)
    if (!neg_.count(uri)) neg_.emplace(uri, s_not(b));
}

bool Env::not_closed() const {
  for (auto& [uri, b] : pos_)
    if (!neg_.count(uri)) return false;
  return true;
}

const std::string& Env::x1() {
  if (x1_.empty()) {
    if (pos_.empty()) {
      bind("\xE2\x8A\xA5root", s_false());  // no refs at all; a dummy false binding
      not_complete();
    }
    x1_ = pos_.begin()->first;
  }
  return x1_;
}

CRef Env::x_false() {
  const std::string& x = x1();
  return CRef(std::vector<RefName>{{x, false}, {x, true}});
}

namespace {

void collect_refs(const Schema& s, bool guarded, std::vector<std::pair<std::string, bool>>& out) {
  if (s->op == Op::Ref) {
    for (auto& r : s->ref.members()) out.emplace_back(r.uri, guarded);
    return;
  }
  bool g = guarded || is_structural(s->op);
  for (auto& k : s->kids) collect_refs(k, g, out);
}

}  // namespace

std::vector<std::string> reachable_uris(const Document& doc) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::vector<Schema> todo{doc.root};
  while (!todo.empty()) {
    Schema s = todo.back();
    todo.pop_back();
    std::vector<std::pair<std::string, bool>> refs;
    collect_refs(s, false, refs);
    for (auto& [u, g] : refs) {
      if (!seen.insert(u).second) continue;
      order.push_back(u);
      auto& b = doc.env.bindings();
      auto it = b.find(u);
      if (it != b.end()) todo.push_back(it->second);
    }
  }
  return order;
}

std::vector<Diagnostic> well_formed(const Document& doc) {
  std::vector<Diagnostic> diags;
  auto& b = doc.env.bindings();
  auto reach = reachable_uris(doc);
  // unguarded edges between reachable definitions
  std::map<std::string, std::vector<std::string>> edges;
  for (auto& u : reach) {
    auto it = b.find(u);
    if (it == b.end()) {
      diags.push_back({DiagKind::UnboundRef, "unbound reference " + u});
      continue;
    }
    std::vector<std::pair<std::string, bool>> refs;
    collect_refs(it->second, false, refs);
    for (auto& [v, g] : refs)
      if (!g && b.count(v)) edges[u].push_back(v);
  }
  // DFS for cycles made only of unguarded edges
  std::map<std::string, int> color;
  std::vector<std::string> path;
  std::function<void(const std::string&)> dfs = [&](const std::string& u) {
    color[u] = 1;
    path.push_back(u);
    for (auto& v : edges[u]) {
      if (color[v] == 1) {
        std::string cyc;
        auto at = std::find(path.begin(), path.end(), v);
        for (auto p = at; p != path.end(); ++p) cyc += *p + " -> ";
        diags.push_back({DiagKind::UnguardedCycle, "unguarded recursion: " + cyc + v});
      } else if (color[v] == 0) {
        dfs(v);
      }
    }
    path.pop_back();
    color[u] = 2;
  };
  for (auto& u : reach)
    if (color[u] == 0 && b.count(u)) dfs(u);
  return diags;
}

}  // namespace refnorm
