#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "refnorm/schema.hpp"

namespace refnorm {

struct NumBound {
  Decimal v;
  bool strict = false;
};

struct NumberConj {
  std::optional<NumBound> lo, hi;
  std::optional<Decimal> mult;
  std::vector<Decimal> not_mult;
};

struct StringConj {
  Pattern pattern = p_true();
};

struct BoolConj {
  std::optional<bool> value;
};

struct NullConj {};

// pattern, its property ref, and the internalized requirements
struct Fragment {
  Pattern pattern;
  CRef pref;
  std::vector<CRef> reqs;
};

struct ObjectConj {
  std::vector<Fragment> frags{{p_true(), CRef(), {}}};
  std::uint64_t min_props = 0;
  std::optional<std::uint64_t> max_props;
};

// positions [0, items.size()) have their own ref, the rest share `additional`;
// contains entries always start at or beyond items.size()
struct ArrayConj {
  std::vector<CRef> items;
  CRef additional;
  std::vector<std::pair<std::uint64_t, CRef>> contains;
  std::uint64_t min_its = 0;
  std::optional<std::uint64_t> max_its;
  bool unique = false;
  bool not_unique = false;
};

struct TypeSetConj {
  TypeSet types;
};

// Variant order follows JsonType for the typed alternatives.
using ConjData = std::variant<NullConj, BoolConj, NumberConj, StringConj, ArrayConj, ObjectConj, TypeSetConj>;

struct Conj {
  ConjData data;
  bool is_typeset() const { return std::holds_alternative<TypeSetConj>(data); }
  // only meaningful when !is_typeset()
  JsonType type() const { return static_cast<JsonType>(data.index()); }
};

using Dnf = std::vector<Conj>;

Conj c_true();
Conj c_fresh(JsonType t);
inline Dnf d_false() { return {}; }
Dnf any_dd(Dnf a, Dnf b);

std::string describe(const Conj& c);
std::string describe(const Dnf& d);

// Push a negation one level down. Structural children must be refs.
Schema not_push(const Schema& s, Env& env);

// oneOf -> anyOf of "this one and none of the others"
Schema expand_oneof(const Schema& s);
void expand_oneof(Document& doc);

// Structural children become refs to fresh, hash-consed definitions.
void stratify(Document& doc);

// Everything the canonical forms promise, for tests. Empty when fine.
std::vector<std::string> check_invariants(const Conj& c, const CRef& x_false);

}  // namespace refnorm
