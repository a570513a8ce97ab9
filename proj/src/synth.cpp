#include "refnorm/synth.hpp"

#include <stdexcept>

#include "refnorm/compat.hpp"

namespace refnorm {

namespace {

using Obj = JsonValue::Object;
using Arr = JsonValue::Array;

JsonValue ref_to(const std::string& def) { return Obj{{"$ref", "#/definitions/" + def}}; }

SynthPair self_incl(int n, int m) {
  Obj defs;
  Arr disjuncts;
  for (int i = 1; i <= n; ++i) {
    Obj props;
    for (int j = 1; j <= m; ++j) {
      std::string x = "x" + std::to_string(i) + "_" + std::to_string(j);
      // each body is distinct so no two definitions collapse into one
      defs[x] = Obj{{"type", "number"}, {"minimum", (i - 1) * m + j}};
      props["k" + std::to_string(i) + "_" + std::to_string(j)] = ref_to(x);
    }
    disjuncts.push_back(Obj{{"properties", std::move(props)}});
  }
  JsonValue s = Obj{{"definitions", std::move(defs)}, {"anyOf", std::move(disjuncts)}};
  return {"selfIncl_n" + std::to_string(n) + "_m" + std::to_string(m), s, s, true, true};
}

// Distinct JSON types first; past those, disjoint integer ranges.
JsonValue fan_branch(int i) {
  static const char* kTypes[] = {"null", "boolean", "string", "array", "object"};
  if (i < 5) return Obj{{"type", kTypes[i]}};
  int lo = i - 5;
  return Obj{{"type", "number"}, {"minimum", lo}, {"exclusiveMaximum", lo + 1}};
}

SynthPair oneof_fan(int n) {
  Arr branches;
  for (int i = 0; i < n; ++i) branches.push_back(fan_branch(i));
  JsonValue s = Obj{{"oneOf", std::move(branches)}};
  return {"oneofFan_n" + std::to_string(n), s, one_of_to_any_of(s), true, true};
}

JsonValue rec_lists(int n, bool integral) {
  Obj defs;
  for (int i = 0; i < n; ++i) {
    Obj head{{"type", "number"}};
    if (integral) head["multipleOf"] = 1;
    Obj list{{"type", "array"},
             {"items", Arr{JsonValue(std::move(head)), ref_to("l" + std::to_string((i + 1) % n))}},
             {"maxItems", 2}};
    defs["l" + std::to_string(i)] = Obj{{"anyOf", Arr{Obj{{"type", "null"}}, JsonValue(std::move(list))}}};
  }
  return Obj{{"definitions", std::move(defs)}, {"$ref", "#/definitions/l0"}};
}

SynthPair rec_depth(int n) {
  return {"recDepth_n" + std::to_string(n), rec_lists(n, true), rec_lists(n, false), true, false};
}

}  // namespace

bool synth_family_from_name(const std::string& name, SynthFamily& out) {
  if (name == "selfIncl") out = SynthFamily::SelfIncl;
  else if (name == "oneofFan") out = SynthFamily::OneofFan;
  else if (name == "recDepth") out = SynthFamily::RecDepth;
  else return false;
  return true;
}

const char* synth_family_name(SynthFamily f) {
  switch (f) {
    case SynthFamily::SelfIncl: return "selfIncl";
    case SynthFamily::OneofFan: return "oneofFan";
    case SynthFamily::RecDepth: return "recDepth";
  }
  return "?";
}

SynthPair synthesize(SynthFamily family, int n, int m) {
  if (n < 1 || m < 1) throw std::invalid_argument("synthesize: n and m must be at least 1");
  switch (family) {
    case SynthFamily::SelfIncl: return self_incl(n, m);
    case SynthFamily::OneofFan: return oneof_fan(n);
    case SynthFamily::RecDepth: return rec_depth(n);
  }
  throw std::invalid_argument("synthesize: unknown family");
}

}  // namespace refnorm
