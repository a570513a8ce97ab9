#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "refnorm/json_value.hpp"
#include "refnorm/pattern.hpp"

namespace refnorm {

class TypeSet {
 public:
  TypeSet() = default;
  static TypeSet of(JsonType t) { return TypeSet(static_cast<std::uint8_t>(1u << static_cast<int>(t))); }
  static TypeSet all() { return TypeSet(0x3F); }
  bool has(JsonType t) const { return bits_ & (1u << static_cast<int>(t)); }
  void add(JsonType t) { bits_ |= static_cast<std::uint8_t>(1u << static_cast<int>(t)); }
  void remove(JsonType t) { bits_ &= static_cast<std::uint8_t>(~(1u << static_cast<int>(t))); }
  TypeSet operator&(TypeSet o) const { return TypeSet(bits_ & o.bits_); }
  TypeSet operator|(TypeSet o) const { return TypeSet(bits_ | o.bits_); }
  TypeSet complement() const { return TypeSet(~bits_ & 0x3F); }
  bool empty() const { return bits_ == 0; }
  int count() const { return __builtin_popcount(bits_); }
  std::uint8_t bits() const { return bits_; }
  std::vector<JsonType> members() const;
  friend bool operator==(TypeSet a, TypeSet b) = default;

 private:
  explicit TypeSet(unsigned b) : bits_(static_cast<std::uint8_t>(b)) {}
  std::uint8_t bits_ = 0;
};

// Signed reference name: x or its complement.
struct RefName {
  std::string uri;
  bool neg = false;
  RefName flipped() const { return {uri, !neg}; }
  friend auto operator<=>(const RefName&, const RefName&) = default;
  friend bool operator==(const RefName&, const RefName&) = default;
};

// Conjunction reference: a sorted set of signed names. Empty set is "true".
class CRef {
 public:
  CRef() = default;
  explicit CRef(RefName r) : m_{std::move(r)} {}
  explicit CRef(std::vector<RefName> ms);
  const std::vector<RefName>& members() const { return m_; }
  bool is_true() const { return m_.empty(); }
  bool singleton() const { return m_.size() == 1; }
  // x and x-bar both present
  bool has_complementary_pair() const;
  CRef join(const CRef& o) const;
  std::size_t hash() const;
  std::string to_string() const;
  friend auto operator<=>(const CRef&, const CRef&) = default;
  friend bool operator==(const CRef&, const CRef&) = default;

 private:
  std::vector<RefName> m_;
};

struct CRefHash {
  std::size_t operator()(const CRef& c) const { return c.hash(); }
};

enum class Op : std::uint8_t {
  Type, Const, NotConst, Ref, True, False,
  AllOf, AnyOf, OneOf, Not,
  PProp, PReq, MinProps, MaxProps,
  Item, AdditionalItems, ContainsAfter, MinIts, MaxIts, UniqueIts, NotUniqueIts,
  Minimum, ExMin, Maximum, ExMax, MultipleOf, NotMultipleOf,
  Pattern,
};

struct SchemaNode;
using Schema = std::shared_ptr<const SchemaNode>;

struct SchemaNode {
  Op op;
  TypeSet types;
  JsonValue value;  // const / notConst (number or boolean)
  CRef ref;
  std::vector<Schema> kids;
  Pattern pattern = nullptr;
  std::uint64_t n = 0;
  Decimal q;
  std::size_t hash = 0;
};

Schema s_type(TypeSet t);
Schema s_type(JsonType t);
Schema s_const(JsonValue v);
Schema s_not_const(JsonValue v);
Schema s_ref(CRef r);
Schema s_ref(const std::string& uri, bool neg = false);
Schema s_true();
Schema s_false();
Schema s_all(std::vector<Schema> ss);
Schema s_any(std::vector<Schema> ss);
Schema s_one(std::vector<Schema> ss);
Schema s_not(Schema s);
Schema s_pprop(Pattern e, Schema s);
Schema s_preq(Pattern e, Schema s);
Schema s_min_props(std::uint64_t n);
Schema s_max_props(std::uint64_t n);
Schema s_item(std::uint64_t i, Schema s);
Schema s_additional(std::uint64_t i, Schema s);
Schema s_contains(std::uint64_t i, Schema s);
Schema s_min_its(std::uint64_t n);
Schema s_max_its(std::uint64_t n);
Schema s_unique();
Schema s_not_unique();
Schema s_minimum(Decimal q);
Schema s_ex_min(Decimal q);
Schema s_maximum(Decimal q);
Schema s_ex_max(Decimal q);
Schema s_multiple_of(Decimal q);
Schema s_not_multiple_of(Decimal q);
Schema s_pattern(Pattern e);

bool schema_equal(const Schema& a, const Schema& b);
struct SchemaHash {
  std::size_t operator()(const Schema& s) const { return s->hash; }
};
struct SchemaEq {
  bool operator()(const Schema& a, const Schema& b) const { return schema_equal(a, b); }
};

std::size_t schema_size(const Schema& s);
bool is_structural(Op op);  // pProp, pReq, item, additionalItems, containsAfter
std::string to_string(const Schema& s);

// Definitions plus their complements once not-completed.
class Env {
 public:
  void bind(const std::string& uri, Schema body);
  bool has(const std::string& uri) const { return pos_.count(uri) != 0; }
  Schema body(const RefName& r) const;
  Schema body_of(const CRef& c) const;  // conjunction of member bodies
  const std::map<std::string, Schema>& bindings() const { return pos_; }
  std::map<std::string, Schema>& bindings() { return pos_; }
  // x-bar := not(x) for every x still lacking a complement
  void not_complete();
  bool not_closed() const;

  // designated x1 for xFalse; a false binding is added for empty envs
  const std::string& x1();
  CRef x_false();
  static CRef x_true() { return CRef(); }

 private:
  std::map<std::string, Schema> pos_, neg_;
  std::string x1_;
};

struct Document {
  Env env;
  Schema root;
};

enum class DiagKind { UnboundRef, UnguardedCycle };
struct Diagnostic {
  DiagKind kind;
  std::string message;
};

std::vector<Diagnostic> well_formed(const Document& doc);

// Every ref reachable from root, in visiting order.
std::vector<std::string> reachable_uris(const Document& doc);

}  // namespace refnorm
