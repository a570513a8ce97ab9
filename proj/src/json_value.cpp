#include "refnorm/json_value.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace refnorm {

const char* type_name(JsonType t) {
  switch (t) {
    case JsonType::Null: return "null";
    case JsonType::Boolean: return "boolean";
    case JsonType::Number: return "number";
    case JsonType::String: return "string";
    case JsonType::Array: return "array";
    case JsonType::Object: return "object";
  }
  return "?";
}

bool type_from_name(std::string_view n, JsonType& out) {
  for (int i = 0; i < kJsonTypeCount; ++i) {
    if (n == type_name(static_cast<JsonType>(i))) {
      out = static_cast<JsonType>(i);
      return true;
    }
  }
  return false;
}

const JsonValue* JsonValue::find(const std::string& key) const {
  if (!is_object()) return nullptr;
  auto& o = as_object();
  auto it = o.find(key);
  return it == o.end() ? nullptr : &it->second;
}

bool operator==(const JsonValue& a, const JsonValue& b) { return a.v_ == b.v_; }

bool operator<(const JsonValue& a, const JsonValue& b) {
  if (a.v_.index() != b.v_.index()) return a.v_.index() < b.v_.index();
  switch (a.type()) {
    case JsonType::Null: return false;
    case JsonType::Boolean: return a.as_bool() < b.as_bool();
    case JsonType::Number: return a.as_number() < b.as_number();
    case JsonType::String: return a.as_string() < b.as_string();
    case JsonType::Array: return a.as_array() < b.as_array();
    case JsonType::Object: return a.as_object() < b.as_object();
  }
  return false;
}

std::size_t JsonValue::hash() const {
  std::size_t h = v_.index() * 0x9e3779b97f4a7c15ULL;
  auto mix = [&h](std::size_t x) { h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  switch (type()) {
    case JsonType::Null: break;
    case JsonType::Boolean: mix(as_bool()); break;
    case JsonType::Number: mix(as_number().hash()); break;
    case JsonType::String: mix(std::hash<std::string>{}(as_string())); break;
    case JsonType::Array:
      for (auto& e : as_array()) mix(e.hash());
      break;
    case JsonType::Object:
      for (auto& [k, e] : as_object()) {
        mix(std::hash<std::string>{}(k));
        mix(e.hash());
      }
      break;
  }
  return h;
}

std::size_t JsonValue::size() const {
  std::size_t n = 1;
  if (is_array())
    for (auto& e : as_array()) n += e.size();
  if (is_object())
    for (auto& [k, e] : as_object()) n += e.size();
  return n;
}

namespace {

// SAX handler: nlohmann hands us the raw text for non-integral numbers,
// which keeps decimals exact.
class Builder : public nlohmann::json_sax<nlohmann::json> {
 public:
  JsonValue result;

  bool null() override { return put(JsonValue(nullptr)); }
  bool boolean(bool b) override { return put(JsonValue(b)); }
  bool number_integer(number_integer_t v) override { return put(JsonValue(Decimal(static_cast<long>(v)))); }
  bool number_unsigned(number_unsigned_t v) override {
    return put(JsonValue(Decimal::parse(std::to_string(v))));
  }
  bool number_float(number_float_t, const string_t& s) override { return put(JsonValue(Decimal::parse(s))); }
  bool string(string_t& s) override { return put(JsonValue(std::move(s))); }
  bool binary(binary_t&) override { return false; }
  bool start_object(std::size_t) override {
    stack_.emplace_back(JsonValue(JsonValue::Object{}), std::string());
    return true;
  }
  bool key(string_t& k) override {
    stack_.back().second = std::move(k);
    return true;
  }
  bool end_object() override { return pop(); }
  bool start_array(std::size_t) override {
    stack_.emplace_back(JsonValue(JsonValue::Array{}), std::string());
    return true;
  }
  bool end_array() override { return pop(); }
  bool parse_error(std::size_t pos, const std::string&, const nlohmann::detail::exception& ex) override {
    throw JsonParseError("JSON parse error at byte " + std::to_string(pos) + ": " + ex.what());
  }

 private:
  std::vector<std::pair<JsonValue, std::string>> stack_;

  bool put(JsonValue v) {
    if (stack_.empty()) {
      result = std::move(v);
      return true;
    }
    auto& [top, k] = stack_.back();
    if (top.is_array()) {
      top.as_array().push_back(std::move(v));
    } else {
      // duplicate keys: last one wins, same as the DOM parser
      top.as_object()[k] = std::move(v);
    }
    return true;
  }
  bool pop() {
    JsonValue v = std::move(stack_.back().first);
    stack_.pop_back();
    return put(std::move(v));
  }
};

void dump_string(std::string& out, const std::string& s) {
  out += nlohmann::json(s).dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

void dump(std::string& out, const JsonValue& v, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case JsonType::Null: out += "null"; break;
    case JsonType::Boolean: out += v.as_bool() ? "true" : "false"; break;
    case JsonType::Number: out += v.as_number().to_string(); break;
    case JsonType::String: dump_string(out, v.as_string()); break;
    case JsonType::Array: {
      auto& a = v.as_array();
      if (a.empty()) {
        out += "[]";
        break;
      }
      out.push_back('[');
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out.push_back(',');
        newline(depth + 1);
        dump(out, a[i], indent, depth + 1);
      }
      newline(depth);
      out.push_back(']');
      break;
    }
    case JsonType::Object: {
      auto& o = v.as_object();
      if (o.empty()) {
        out += "{}";
        break;
      }
      out.push_back('{');
      bool first = true;
      for (auto& [k, e] : o) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        dump_string(out, k);
        out += indent < 0 ? ":" : ": ";
        dump(out, e, indent, depth + 1);
      }
      newline(depth);
      out.push_back('}');
      break;
    }
  }
}

}  // namespace

JsonValue parse_json(std::string_view text) {
  Builder b;
  try {
    nlohmann::json::sax_parse(text.begin(), text.end(), &b);
  } catch (const nlohmann::json::exception& e) {
    throw JsonParseError(e.what());
  } catch (const std::invalid_argument& e) {
    throw JsonParseError(e.what());
  }
  return std::move(b.result);
}

JsonValue parse_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw JsonParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

std::string dump_json(const JsonValue& v, int indent) {
  std::string out;
  dump(out, v, indent, 0);
  return out;
}

void utf8_append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string utf8_encode(std::u32string_view s) {
  std::string out;
  for (char32_t c : s) utf8_append(out, c);
  return out;
}

std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    auto c = static_cast<unsigned char>(s[i]);
    int len = c < 0x80 ? 1 : (c >> 5) == 6 ? 2 : (c >> 4) == 14 ? 3 : (c >> 3) == 30 ? 4 : 0;
    if (len == 0 || i + len > s.size()) throw std::invalid_argument("invalid utf-8");
    char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
    for (int k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 2) throw std::invalid_argument("invalid utf-8");
      cp = (cp << 6) | (cc & 0x3F);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

}  // namespace refnorm
