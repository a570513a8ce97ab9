#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "refnorm/decimal.hpp"

namespace refnorm {

// Order matters: the witness generator tries types in this order.
enum class JsonType : std::uint8_t { Null = 0, Boolean, Number, String, Array, Object };
inline constexpr int kJsonTypeCount = 6;

const char* type_name(JsonType t);
// "integer" is not a JsonType; callers handle it
bool type_from_name(std::string_view name, JsonType& out);

class JsonValue {
 public:
  using Array = std::vector<JsonValue>;
  using Object = std::map<std::string, JsonValue>;

  JsonValue() = default;
  JsonValue(std::nullptr_t) {}                      // NOLINT
  JsonValue(bool b) : v_(b) {}                      // NOLINT
  JsonValue(Decimal d) : v_(std::move(d)) {}        // NOLINT
  JsonValue(long n) : v_(Decimal(n)) {}             // NOLINT
  JsonValue(int n) : v_(Decimal(static_cast<long>(n))) {}  // NOLINT
  JsonValue(std::string s) : v_(std::move(s)) {}    // NOLINT
  JsonValue(const char* s) : v_(std::string(s)) {}  // NOLINT
  JsonValue(Array a) : v_(std::move(a)) {}          // NOLINT
  JsonValue(Object o) : v_(std::move(o)) {}         // NOLINT

  JsonType type() const { return static_cast<JsonType>(v_.index()); }
  bool is_null() const { return type() == JsonType::Null; }
  bool is_bool() const { return type() == JsonType::Boolean; }
  bool is_number() const { return type() == JsonType::Number; }
  bool is_string() const { return type() == JsonType::String; }
  bool is_array() const { return type() == JsonType::Array; }
  bool is_object() const { return type() == JsonType::Object; }

  bool as_bool() const { return std::get<bool>(v_); }
  const Decimal& as_number() const { return std::get<Decimal>(v_); }
  const std::string& as_string() const { return std::get<std::string>(v_); }
  const Array& as_array() const { return std::get<Array>(v_); }
  Array& as_array() { return std::get<Array>(v_); }
  const Object& as_object() const { return std::get<Object>(v_); }
  Object& as_object() { return std::get<Object>(v_); }

  const JsonValue* find(const std::string& key) const;

  // Numbers compare by value, objects ignore member order.
  friend bool operator==(const JsonValue& a, const JsonValue& b);
  // Total order used for sorting/dedup (type first, then value)
  friend bool operator<(const JsonValue& a, const JsonValue& b);

  std::size_t hash() const;
  // number of nodes in the tree
  std::size_t size() const;

 private:
  std::variant<std::nullptr_t, bool, Decimal, std::string, Array, Object> v_{nullptr};
};

struct JsonParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numbers keep their exact decimal value.
JsonValue parse_json(std::string_view text);
JsonValue parse_json_file(const std::string& path);

// indent < 0 gives the compact form. Keys come out sorted.
std::string dump_json(const JsonValue& v, int indent = 2);

// utf-8 <-> code points; invalid input throws std::invalid_argument
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);
void utf8_append(std::string& out, char32_t cp);

}  // namespace refnorm
