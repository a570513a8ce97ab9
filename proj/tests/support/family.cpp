#include "family.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace refnorm::testing {

namespace {

using Obj = JsonValue::Object;
using Arr = JsonValue::Array;

int pick(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
bool chance(Rng& rng, double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

template <class T>
const T& one(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(pick(rng, static_cast<int>(v.size())))];
}

JsonValue number(Rng& rng) { return JsonValue(one(rng, family_numbers())); }

const std::vector<std::string> kTypes = {"null", "boolean", "number", "integer", "string", "array", "object"};

JsonValue scalar_value(Rng& rng) {
  switch (pick(rng, 5)) {
    case 0: return nullptr;
    case 1: return chance(rng, 0.5);
    case 2: return one(rng, std::vector<std::string>{"a", "ab", "b"});
    default: return number(rng);
  }
}

void merge(Obj& into, const Obj& from) {
  for (auto& [k, v] : from) into.emplace(k, v);
}

Obj type_atom(Rng& rng) {
  Obj o;
  if (chance(rng, 0.6)) {
    o["type"] = one(rng, kTypes);
  } else {
    std::string a = one(rng, kTypes), b = one(rng, kTypes);
    if (a == b) {
      o["type"] = a;
    } else {
      o["type"] = Arr{a, b};
    }
  }
  return o;
}

Obj const_atom(Rng& rng) {
  Obj o;
  if (chance(rng, 0.5)) {
    o["const"] = scalar_value(rng);
  } else {
    Arr vals{scalar_value(rng), scalar_value(rng)};
    if (vals[0] == vals[1]) vals.pop_back();
    o["enum"] = vals;
  }
  return o;
}

Obj number_atom(Rng& rng) {
  static const std::vector<std::string> bounds = {"minimum", "maximum", "exclusiveMinimum", "exclusiveMaximum"};
  Obj o;
  if (chance(rng, 0.5)) o["type"] = chance(rng, 0.7) ? "number" : "integer";
  int n = 1 + pick(rng, 2);
  for (int i = 0; i < n; ++i) o[one(rng, bounds)] = number(rng);
  if (chance(rng, 0.3)) o["multipleOf"] = chance(rng, 0.5) ? JsonValue(Decimal::parse("0.5")) : JsonValue(1);
  return o;
}

Obj string_atom(Rng& rng) {
  Obj o;
  if (chance(rng, 0.5)) o["type"] = "string";
  if (chance(rng, 0.7)) o["pattern"] = one(rng, family_patterns());
  if (chance(rng, 0.3)) o["minLength"] = pick(rng, 3);
  if (chance(rng, 0.3)) o["maxLength"] = pick(rng, 3);
  if (o.size() < 2 && !o.count("pattern")) o["pattern"] = one(rng, family_patterns());
  return o;
}

Obj object_atom(Rng& rng, int depth) {
  Obj o;
  if (chance(rng, 0.5)) o["type"] = "object";
  Obj props;
  for (const char* k : {"a", "b"})
    if (chance(rng, 0.45)) props[k] = family_schema(rng, depth + 1);
  if (!props.empty()) o["properties"] = props;
  Arr req;
  for (const char* k : {"a", "b"})
    if (chance(rng, 0.3)) req.push_back(k);
  if (!req.empty()) o["required"] = req;
  if (chance(rng, 0.3)) o["additionalProperties"] = chance(rng, 0.4) ? JsonValue(false) : family_schema(rng, depth + 1);
  if (chance(rng, 0.25)) o["minProperties"] = pick(rng, 3);
  if (chance(rng, 0.25)) o["maxProperties"] = pick(rng, 3);
  if (o.empty() || (o.size() == 1 && o.count("type"))) o["required"] = Arr{chance(rng, 0.5) ? "a" : "b"};
  return o;
}

Obj array_atom(Rng& rng, int depth) {
  Obj o;
  if (chance(rng, 0.5)) o["type"] = "array";
  if (chance(rng, 0.5)) {
    if (chance(rng, 0.5)) {
      o["items"] = family_schema(rng, depth + 1);
    } else {
      o["items"] = Arr{family_schema(rng, depth + 1)};
      if (chance(rng, 0.5)) o["additionalItems"] = chance(rng, 0.4) ? JsonValue(false) : family_schema(rng, depth + 1);
    }
  }
  if (chance(rng, 0.35)) o["contains"] = family_schema(rng, depth + 1);
  if (chance(rng, 0.3)) o["minItems"] = pick(rng, 3);
  if (chance(rng, 0.3)) o["maxItems"] = pick(rng, 3);
  if (o.empty() || (o.size() == 1 && o.count("type"))) o["maxItems"] = pick(rng, 3);
  return o;
}

Obj atom(Rng& rng, int depth) {
  const bool leaf = depth >= 3;
  int k = pick(rng, leaf ? 4 : 7);
  switch (k) {
    case 0: return type_atom(rng);
    case 1: return const_atom(rng);
    case 2: return number_atom(rng);
    case 3: return string_atom(rng);
    case 4:
    case 5: return chance(rng, 0.5) ? object_atom(rng, depth) : array_atom(rng, depth);
    default: {
      Obj o;
      int c = pick(rng, 4);
      if (c == 3) {
        o["not"] = family_schema(rng, depth + 1);
      } else {
        static const char* names[] = {"allOf", "anyOf", "oneOf"};
        o[names[c]] = Arr{family_schema(rng, depth + 1), family_schema(rng, depth + 1)};
      }
      return o;
    }
  }
}

// drop or weaken one keyword somewhere; the result may relate either way
JsonValue mutate(Rng& rng, const JsonValue& s) {
  if (!s.is_object() || s.as_object().empty()) return chance(rng, 0.5) ? JsonValue(true) : s;
  Obj o = s.as_object();
  std::vector<std::string> keys;
  for (auto& [k, v] : o) keys.push_back(k);
  const std::string& k = one(rng, keys);
  JsonValue& v = o[k];
  if (chance(rng, 0.4)) {
    o.erase(k);
  } else if (v.is_object() && (k == "not" || k == "items" || k == "contains" || k == "additionalProperties" ||
                               k == "additionalItems")) {
    v = mutate(rng, v);
  } else if (v.is_object() && k == "properties" && !v.as_object().empty()) {
    auto& m = v.as_object();
    auto it = m.begin();
    std::advance(it, pick(rng, static_cast<int>(m.size())));
    it->second = mutate(rng, it->second);
  } else if (v.is_array() && !v.as_array().empty() && v.as_array()[0].is_object()) {
    auto& a = v.as_array();
    auto& e = a[static_cast<std::size_t>(pick(rng, static_cast<int>(a.size())))];
    e = mutate(rng, e);
  } else if (v.is_number()) {
    if (k == "multipleOf") {
      o.erase(k);
    } else if (k.rfind("min", 0) == 0 && k != "minimum") {
      v = pick(rng, 3);
    } else if (k.rfind("max", 0) == 0 && k != "maximum") {
      v = pick(rng, 3);
    } else {
      v = number(rng);
    }
  } else {
    o.erase(k);
  }
  return o;
}

}  // namespace

const std::vector<Decimal>& family_numbers() {
  static const std::vector<Decimal> d = {Decimal(-1), Decimal::parse("-0.5"), Decimal(0), Decimal::parse("0.5"),
                                         Decimal(1),  Decimal::parse("1.5"),  Decimal(2)};
  return d;
}

const std::vector<std::string>& family_patterns() {
  static const std::vector<std::string> p = {"^a", "b$", "^a*$", "ab", "^(a|b)$"};
  return p;
}

JsonValue family_schema(Rng& rng, int depth) {
  if (chance(rng, 0.05)) return chance(rng, 0.5);
  Obj o = atom(rng, depth);
  if (chance(rng, 0.25)) merge(o, atom(rng, depth));
  return o;
}

std::pair<JsonValue, JsonValue> family_pair(Rng& rng) {
  switch (pick(rng, 6)) {
    case 0:
    case 1: return {family_schema(rng), family_schema(rng)};
    case 2: {
      JsonValue s = family_schema(rng);
      return {s, mutate(rng, s)};
    }
    case 3: {
      JsonValue s = family_schema(rng);
      return {mutate(rng, s), s};
    }
    case 4: {
      // conjunction on the left, a conjunct on the right
      JsonValue a = family_schema(rng, 2), b = family_schema(rng, 2);
      return {Obj{{"allOf", Arr{a, b}}}, chance(rng, 0.5) ? a : mutate(rng, b)};
    }
    default: {
      JsonValue a = family_schema(rng, 2), b = family_schema(rng, 2);
      return {chance(rng, 0.5) ? a : mutate(rng, a), Obj{{"anyOf", Arr{a, b}}}};
    }
  }
}

JsonValue family_document(Rng& rng) {
  JsonValue root = family_schema(rng);
  if (!chance(rng, 0.5)) return root;
  // t: null, or a container whose children recurse into t
  Obj t;
  Obj rec{{"$ref", "#/definitions/t"}};
  switch (pick(rng, 3)) {
    case 0:
      t["anyOf"] = Arr{Obj{{"type", "null"}}, Obj{{"type", "object"}, {"properties", Obj{{"a", rec}}}}};
      break;
    case 1:
      t["anyOf"] = Arr{Obj{{"type", "number"}}, Obj{{"type", "array"}, {"items", rec}, {"maxItems", 2}}};
      break;
    default:
      t = Obj{{"type", "object"}, {"properties", Obj{{"b", rec}}}, {"required", Arr{"a"}}};
      break;
  }
  Obj doc;
  doc["definitions"] = Obj{{"t", t}};
  doc["anyOf"] = Arr{root, chance(rng, 0.5) ? JsonValue(rec) : JsonValue(Obj{{"properties", Obj{{"a", rec}}}})};
  return doc;
}

namespace {

std::vector<Pattern> string_atoms() {
  std::vector<Pattern> atoms;
  for (auto& p : family_patterns()) atoms.push_back(p_regex(p));
  for (int n = 1; n <= 2; ++n) atoms.push_back(p_min_len(static_cast<std::uint64_t>(n)));
  for (int n = 0; n <= 2; ++n) atoms.push_back(p_max_len(static_cast<std::uint64_t>(n)));
  for (const char* k : {"a", "ab", "b"}) atoms.push_back(p_key(k));
  return atoms;
}

// one member of every satisfiable sign assignment of the atoms
void cell_examples(const std::vector<Pattern>& atoms, std::size_t i, Pattern cell, std::vector<std::string>& out) {
  if (p_is_empty(cell)) return;
  if (i == atoms.size()) {
    out.push_back(*p_example(cell));
    return;
  }
  cell_examples(atoms, i + 1, p_all({cell, atoms[i]}), out);
  cell_examples(atoms, i + 1, p_all({cell, p_not(atoms[i])}), out);
}

}  // namespace

UniverseParams family_universe() {
  UniverseParams u;
  u.max_depth = 3;
  u.max_width = 3;
  u.keys = {"a", "b"};
  u.filler_keys = {"c", "d", "e"};
  u.max_props = 3;
  // quarter grid: every cell cut out by the constants and by multipleOf 0.5/1
  for (int q = -8; q <= 12; ++q) {
    if (q == -7 || q == 11) continue;  // -1.75 and 2.75 add nothing beyond -1.25 and 2.25
    u.numbers.push_back(Decimal(q) / Decimal(4));
  }
  static const std::vector<std::string> strings = [] {
    std::vector<std::string> v = {"", "a", "b", "aa", "ab", "ba", "bb", "aaa", "aab", "aba", "abb", "baa", "bab", "bba", "bbb", "c"};
    std::vector<std::string> extra;
    cell_examples(string_atoms(), 0, p_true(), extra);
    for (auto& e : extra)
      if (std::find(v.begin(), v.end(), e) == v.end()) v.push_back(e);
    return v;
  }();
  u.strings = strings;
  u.cap = 20'000'000;
  return u;
}

std::string family_string_coverage_gap() {
  auto atoms = string_atoms();
  auto u = family_universe();
  std::set<std::uint64_t> hit;
  for (auto& s : u.strings) {
    std::uint64_t sig = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (p_contains(atoms[i], std::string_view(s))) sig |= 1ULL << i;
    hit.insert(sig);
  }
  // depth-first over sign assignments, pruning empty partial cells
  std::string gap;
  auto rec = [&](auto& self, std::size_t i, Pattern cell, std::uint64_t sig) -> void {
    if (!gap.empty() || p_is_empty(cell)) return;
    if (i == atoms.size()) {
      if (!hit.count(sig)) gap = "no universe string in " + to_string(cell) + ", e.g. " + p_example(cell).value_or("?");
      return;
    }
    self(self, i + 1, p_all({cell, atoms[i]}), sig | (1ULL << i));
    self(self, i + 1, p_all({cell, p_not(atoms[i])}), sig);
  };
  rec(rec, 0, p_true(), 0);
  return gap;
}

std::string family_number_coverage_gap() {
  // signature of x: its relation to each constant and its multipleOf class
  auto sig = [](const Decimal& x) {
    std::vector<int> s;
    for (auto& q : family_numbers()) s.push_back(x < q ? -1 : (x == q ? 0 : 1));
    s.push_back(x.is_multiple_of(Decimal(1)));
    s.push_back(x.is_multiple_of(Decimal::parse("0.5")));
    return s;
  };
  auto u = family_universe();
  std::set<std::vector<int>> hit;
  for (auto& x : u.numbers) hit.insert(sig(x));
  // a grid of sixteenths well past both ends realizes every cell
  for (int k = -64; k <= 64; ++k) {
    Decimal x = Decimal(k) / Decimal(16);
    if (!hit.count(sig(x))) return "no universe number shares the atoms of " + x.to_string();
  }
  return "";
}

std::pair<JsonValue, JsonValue> rule_provable_pair(Rng& rng, int size) {
  auto prop_schema = [&](int i, bool wide) -> JsonValue {
    switch (i % 3) {
      case 0: return wide ? Obj{{"type", "number"}} : Obj{{"type", "integer"}, {"minimum", i}};
      case 1: return wide ? Obj{{"type", "string"}} : Obj{{"type", "string"}, {"pattern", "^a"}};
      default: return wide ? Obj{{"type", Arr{"null", "boolean"}}} : Obj{{"type", "boolean"}};
    }
  };
  auto object = [&](int n, bool wide, int salt) {
    Obj props;
    Arr req;
    for (int i = 0; i < n; ++i) {
      std::string k = "p" + std::to_string(i + salt);
      props[k] = prop_schema(i, wide);
      if (!wide || i % 2 == 0) req.push_back(k);
    }
    return JsonValue(Obj{{"type", "object"}, {"properties", props}, {"required", req}});
  };
  switch (pick(rng, 4)) {
    case 0: {
      // anyOf-l: every left branch is an instance of the right schema
      Arr branches;
      for (int i = 0; i < size; ++i) {
        Obj b = object(3, false, 0).as_object();
        b["maxProperties"] = 3 + i;
        branches.push_back(b);
      }
      return {Obj{{"anyOf", branches}}, object(3, true, 0)};
    }
    case 1: {
      // anyOf-r: the left schema sits among unrelated alternatives
      Arr alts;
      int at = pick(rng, size);
      for (int i = 0; i < size; ++i) alts.push_back(i == at ? object(3, true, 0) : object(2, false, 100 + 2 * i));
      return {object(3, false, 0), Obj{{"anyOf", alts}}};
    }
    case 2:
      // object: fieldwise inclusion
      return {object(size, false, 0), object(size, true, 0)};
    default: {
      // uninhabited left: a required field that must be of two types
      Obj l = object(size, false, 0).as_object();
      l["properties"].as_object()["p0"] = Obj{{"allOf", Arr{Obj{{"type", "number"}}, Obj{{"type", "string"}}}}};
      return {l, object(size, false, 7)};
    }
  }
}

JsonValue exclusive_oneof(Rng& rng, int branches) {
  Arr bs;
  const int style = pick(rng, 3);
  for (int i = 0; i < branches; ++i) {
    Obj b;
    if (style == 0) {
      // tagged union
      Obj props{{"kind", Obj{{"const", i}}}};
      if (chance(rng, 0.5)) props["v"] = family_schema(rng, 3);
      b = Obj{{"type", "object"}, {"required", Arr{"kind"}}, {"properties", props}};
    } else if (style == 1) {
      // disjoint numeric ranges
      b = Obj{{"type", "number"}, {"minimum", 2 * i}, {"exclusiveMaximum", 2 * i + 1 + pick(rng, 2)}};
    } else {
      // distinct types, then disjoint string prefixes
      static const char* types[] = {"null", "boolean", "number", "array", "object"};
      if (i < 5) {
        b = Obj{{"type", types[i]}};
      } else {
        b = Obj{{"type", "string"}, {"pattern", "^" + std::string(static_cast<std::size_t>(i - 5), 'a') + "b"}};
      }
    }
    bs.push_back(b);
  }
  return Obj{{"oneOf", bs}};
}

JsonValue overlapping_oneof(Rng& rng, int branches) {
  Arr bs;
  const int style = pick(rng, 3);
  for (int i = 0; i < branches; ++i) {
    if (style == 0) {
      bs.push_back(Obj{{"type", "number"}, {"minimum", i}, {"maximum", i + 1 + pick(rng, 2)}});
    } else if (style == 1) {
      bs.push_back(Obj{{"type", "object"}, {"required", Arr{"k" + std::to_string(i)}}});
    } else {
      bs.push_back(Obj{{"type", "string"}, {"pattern", i % 2 == 0 ? "^margherita" : "pizza$"}});
    }
  }
  return Obj{{"oneOf", bs}};
}

}  // namespace refnorm::testing
