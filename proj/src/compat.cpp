#include "refnorm/compat.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "refnorm/errors.hpp"

namespace refnorm {

namespace {

const std::set<std::string>& annotation_keywords() {
  // carry no assertions; format is treated as annotation only
  static const std::set<std::string> k{"$schema", "$id", "$comment", "title", "description", "default", "examples", "format"};
  return k;
}

[[noreturn]] void malformed(const std::string& why) { throw Error(ErrorKind::MalformedSchema, why); }

std::string pointer_escape(const std::string& tok) {
  std::string r;
  for (char c : tok) {
    if (c == '~') {
      r += "~0";
    } else if (c == '/') {
      r += "~1";
    } else {
      r.push_back(c);
    }
  }
  return r;
}

std::string percent_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string r;
  for (unsigned char c : s) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.' || c == '~' || c == '/') {
      r.push_back(static_cast<char>(c));
    } else {
      r.push_back('%');
      r.push_back(hex[c >> 4]);
      r.push_back(hex[c & 15]);
    }
  }
  return r;
}

std::string percent_decode(const std::string& s) {
  std::string r;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      auto hv = [](char c) { return c >= '0' && c <= '9' ? c - '0' : c >= 'a' && c <= 'f' ? c - 'a' + 10 : c >= 'A' && c <= 'F' ? c - 'A' + 10 : -1; };
      int a = hv(s[i + 1]), b = hv(s[i + 2]);
      if (a >= 0 && b >= 0) {
        r.push_back(static_cast<char>(a * 16 + b));
        i += 2;
        continue;
      }
    }
    r.push_back(s[i]);
  }
  return r;
}

std::uint64_t nonneg_int(const JsonValue& v, const char* kw) {
  if (!v.is_number() || !v.as_number().is_integer() || v.as_number().sign() < 0 || !v.as_number().fits_long())
    malformed(std::string(kw) + " must be a non-negative integer");
  return static_cast<std::uint64_t>(v.as_number().to_long());
}

const Decimal& number(const JsonValue& v, const char* kw) {
  if (!v.is_number()) {
    if (v.is_bool()) malformed(std::string(kw) + ": boolean form is Draft-04, use the numeric Draft-06 form");
    malformed(std::string(kw) + " must be a number");
  }
  return v.as_number();
}

Schema atom_const(const JsonValue& v, const char* kw) {
  switch (v.type()) {
    case JsonType::Null: return s_type(JsonType::Null);
    case JsonType::Boolean:
    case JsonType::Number: return s_const(v);
    case JsonType::String: return s_all({s_type(JsonType::String), s_pattern(p_key(v.as_string()))});
    default: throw Error(ErrorKind::UnsupportedKeyword, std::string(kw) + " with object/array values");
  }
}

Schema conj(std::vector<Schema> parts) {
  if (parts.empty()) return s_true();
  if (parts.size() == 1) return parts[0];
  return s_all(std::move(parts));
}

class Translator {
 public:
  Translator(const JsonValue& doc, const ParseOptions& opts, Env& env) : doc_(doc), opts_(opts), env_(env) {}

  Schema run() {
    Schema root = tr(doc_);
    while (!pending_.empty()) {
      auto [uri, tokens] = pending_.front();
      pending_.pop_front();
      const JsonValue* at = &doc_;
      for (auto& t : tokens) {
        if (at->is_object()) {
          at = at->find(t);
        } else if (at->is_array()) {
          bool digits = !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
          std::size_t idx = digits && t.size() < 9 ? std::stoul(t) : SIZE_MAX;
          at = idx < at->as_array().size() ? &at->as_array()[idx] : nullptr;
        } else {
          at = nullptr;
        }
        if (!at) throw Error(ErrorKind::UnresolvableRef, uri.substr(opts_.uri_prefix.size()));
      }
      env_.bind(uri, tr(*at));
    }
    return root;
  }

 private:
  const JsonValue& doc_;
  const ParseOptions& opts_;
  Env& env_;
  std::deque<std::pair<std::string, std::vector<std::string>>> pending_;
  std::set<std::string> requested_;

  Schema ref_to(const std::string& ref) {
    if (ref.empty() || ref[0] != '#') throw Error(ErrorKind::UnresolvableRef, ref + " (only document-local refs)");
    std::string frag = percent_decode(ref.substr(1));
    std::vector<std::string> tokens;
    if (!frag.empty()) {
      if (frag[0] != '/') throw Error(ErrorKind::UnresolvableRef, ref + " (plain-name fragments unsupported)");
      std::size_t i = 1;
      for (;;) {
        std::size_t j = frag.find('/', i);
        std::string t = frag.substr(i, j == std::string::npos ? std::string::npos : j - i);
        std::string u;
        for (std::size_t k = 0; k < t.size(); ++k) {
          if (t[k] == '~' && k + 1 < t.size() && (t[k + 1] == '0' || t[k + 1] == '1')) {
            u.push_back(t[k + 1] == '0' ? '~' : '/');
            ++k;
          } else {
            u.push_back(t[k]);
          }
        }
        tokens.push_back(u);
        if (j == std::string::npos) break;
        i = j + 1;
      }
    }
    std::string uri = opts_.uri_prefix + "#";
    for (auto& t : tokens) uri += "/" + pointer_escape(t);
    if (requested_.insert(uri).second) pending_.emplace_back(uri, tokens);
    return s_ref(uri);
  }

  Schema tr(const JsonValue& v) {
    if (v.is_bool()) return v.as_bool() ? s_true() : s_false();
    if (!v.is_object()) malformed("schema must be an object or boolean, got " + std::string(type_name(v.type())));
    auto& o = v.as_object();
    if (auto* r = v.find("$ref")) {
      if (!r->is_string()) malformed("$ref must be a string");
      return ref_to(r->as_string());  // siblings of $ref are ignored in Draft-06
    }
    std::vector<Schema> parts;
    for (auto& [kw, val] : o) {
      if (annotation_keywords().count(kw) || kw == "definitions") continue;
      keyword(v, kw, val, parts);
    }
    if (auto* d = v.find("definitions"))
      if (!d->is_object()) malformed("definitions must be an object");
    return conj(std::move(parts));
  }

  std::vector<Schema> schema_list(const JsonValue& val, const char* kw) {
    if (!val.is_array() || val.as_array().empty()) malformed(std::string(kw) + " must be a non-empty array");
    std::vector<Schema> r;
    for (auto& s : val.as_array()) r.push_back(tr(s));
    return r;
  }

  void keyword(const JsonValue& obj, const std::string& kw, const JsonValue& val, std::vector<Schema>& out) {
    if (kw == "type") {
      std::vector<std::string> names;
      if (val.is_string()) {
        names.push_back(val.as_string());
      } else if (val.is_array()) {
        for (auto& n : val.as_array()) {
          if (!n.is_string()) malformed("type entries must be strings");
          names.push_back(n.as_string());
        }
      } else {
        malformed("type must be a string or array");
      }
      TypeSet ts;
      bool integer = false;
      for (auto& n : names) {
        JsonType t;
        if (n == "integer") {
          integer = true;
        } else if (type_from_name(n, t)) {
          ts.add(t);
        } else {
          malformed("unknown type " + n);
        }
      }
      Schema integers = s_all({s_type(JsonType::Number), s_multiple_of(Decimal(1))});
      if (!integer || ts.has(JsonType::Number)) {
        out.push_back(s_type(ts));
      } else if (ts.empty()) {
        out.push_back(integers);
      } else {
        out.push_back(s_any({s_type(ts), integers}));
      }
    } else if (kw == "enum") {
      if (!val.is_array()) malformed("enum must be an array");
      std::vector<Schema> alts;
      for (auto& m : val.as_array()) alts.push_back(atom_const(m, "enum"));
      out.push_back(alts.empty() ? s_false() : (alts.size() == 1 ? alts[0] : s_any(std::move(alts))));
    } else if (kw == "const") {
      out.push_back(atom_const(val, "const"));
    } else if (kw == "properties") {
      if (!val.is_object()) malformed("properties must be an object");
      for (auto& [k, s] : val.as_object()) out.push_back(s_pprop(p_key(k), tr(s)));
    } else if (kw == "patternProperties") {
      if (!val.is_object()) malformed("patternProperties must be an object");
      for (auto& [r, s] : val.as_object()) out.push_back(s_pprop(p_regex(r), tr(s)));
    } else if (kw == "additionalProperties") {
      std::vector<Pattern> named;
      if (auto* p = obj.find("properties"); p && p->is_object())
        for (auto& [k, s] : p->as_object()) named.push_back(p_key(k));
      if (auto* p = obj.find("patternProperties"); p && p->is_object())
        for (auto& [r, s] : p->as_object()) named.push_back(p_regex(r));
      out.push_back(s_pprop(p_not(p_any(std::move(named))), tr(val)));
    } else if (kw == "required") {
      if (!val.is_array()) malformed("required must be an array");
      for (auto& k : val.as_array()) {
        if (!k.is_string()) malformed("required entries must be strings");
        out.push_back(s_preq(p_key(k.as_string()), s_true()));
      }
    } else if (kw == "minProperties") {
      out.push_back(s_min_props(nonneg_int(val, "minProperties")));
    } else if (kw == "maxProperties") {
      out.push_back(s_max_props(nonneg_int(val, "maxProperties")));
    } else if (kw == "items") {
      if (val.is_array()) {
        auto& a = val.as_array();
        for (std::size_t i = 0; i < a.size(); ++i) out.push_back(s_item(i, tr(a[i])));
        if (auto* ai = obj.find("additionalItems")) out.push_back(s_additional(a.size(), tr(*ai)));
      } else {
        out.push_back(s_additional(0, tr(val)));
      }
    } else if (kw == "additionalItems") {
      // handled with items; meaningless without a tuple form
      if (!val.is_bool() && !val.is_object()) malformed("additionalItems must be a schema");
    } else if (kw == "contains") {
      out.push_back(s_contains(0, tr(val)));
    } else if (kw == "minItems") {
      out.push_back(s_min_its(nonneg_int(val, "minItems")));
    } else if (kw == "maxItems") {
      out.push_back(s_max_its(nonneg_int(val, "maxItems")));
    } else if (kw == "uniqueItems") {
      if (!val.is_bool()) malformed("uniqueItems must be a boolean");
      if (val.as_bool()) out.push_back(s_unique());
    } else if (kw == "minimum") {
      out.push_back(s_minimum(number(val, "minimum")));
    } else if (kw == "maximum") {
      out.push_back(s_maximum(number(val, "maximum")));
    } else if (kw == "exclusiveMinimum") {
      out.push_back(s_ex_min(number(val, "exclusiveMinimum")));
    } else if (kw == "exclusiveMaximum") {
      out.push_back(s_ex_max(number(val, "exclusiveMaximum")));
    } else if (kw == "multipleOf") {
      const Decimal& q = number(val, "multipleOf");
      if (q.sign() <= 0) malformed("multipleOf must be positive");
      out.push_back(s_multiple_of(q));
    } else if (kw == "pattern") {
      if (!val.is_string()) malformed("pattern must be a string");
      out.push_back(s_pattern(p_regex(val.as_string())));
    } else if (kw == "minLength") {
      auto n = nonneg_int(val, "minLength");
      if (n > 0) out.push_back(s_pattern(p_min_len(n)));
    } else if (kw == "maxLength") {
      out.push_back(s_pattern(p_max_len(nonneg_int(val, "maxLength"))));
    } else if (kw == "allOf") {
      out.push_back(s_all(schema_list(val, "allOf")));
    } else if (kw == "anyOf") {
      out.push_back(s_any(schema_list(val, "anyOf")));
    } else if (kw == "oneOf") {
      out.push_back(s_one(schema_list(val, "oneOf")));
    } else if (kw == "not") {
      out.push_back(s_not(tr(val)));
    } else {
      throw Error(ErrorKind::UnsupportedKeyword, kw);
    }
  }
};

std::string def_pointer(const std::string& uri) { return "#/definitions/" + percent_encode(pointer_escape(uri)); }

JsonValue obj1(const char* k, JsonValue v) {
  JsonValue::Object o;
  o.emplace(k, std::move(v));
  return JsonValue(std::move(o));
}

JsonValue arr(std::vector<JsonValue> xs) { return JsonValue(JsonValue::Array(std::move(xs))); }

JsonValue trues(std::uint64_t n) { return arr(std::vector<JsonValue>(n, JsonValue(true))); }

// merge "type": t into an object form (or wrap)
JsonValue typed(const char* t, JsonValue inner) {
  if (inner.is_bool()) return inner.as_bool() ? obj1("type", t) : JsonValue(false);
  if (!inner.find("type")) {
    inner.as_object().emplace("type", t);
    return inner;
  }
  return obj1("allOf", arr({obj1("type", t), std::move(inner)}));
}

std::string key_regex(const std::string& k) {
  std::string r = "^";
  for (char32_t c : utf8_decode(k)) {
    if (c < 0x80 && std::string("\\^$.|?*+()[]{}/-").find(static_cast<char>(c)) != std::string::npos) {
      r.push_back('\\');
      r.push_back(static_cast<char>(c));
    } else if (c < 0x20 || c == 0x7F || (c >= 0xD800 && c <= 0xDFFF) || (c >= 0x80 && c < 0x10000)) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned>(c));
      r += buf;
    } else {
      utf8_append(r, c);
    }
  }
  return r + "$";
}

JsonValue pprop_json(Pattern e, JsonValue s) {
  switch (e->kind) {
    case PatternKind::Key: {
      JsonValue::Object p;
      p.emplace(e->text, std::move(s));
      return obj1("properties", JsonValue(std::move(p)));
    }
    case PatternKind::Regex: {
      JsonValue::Object p;
      p.emplace(e->text, std::move(s));
      return obj1("patternProperties", JsonValue(std::move(p)));
    }
    case PatternKind::Any: {
      if (e->kids.empty()) return JsonValue(true);
      std::vector<JsonValue> xs;
      for (auto k : e->kids) xs.push_back(pprop_json(k, s));
      return obj1("allOf", arr(std::move(xs)));
    }
    case PatternKind::All:
      if (e->kids.empty()) return obj1("additionalProperties", std::move(s));
      break;
    case PatternKind::Not: {
      Pattern inner = e->kids[0];
      std::vector<Pattern> named = inner->kind == PatternKind::Any ? inner->kids : std::vector<Pattern>{inner};
      bool simple = std::all_of(named.begin(), named.end(),
                                [](Pattern p) { return p->kind == PatternKind::Key || p->kind == PatternKind::Regex; });
      if (!simple) break;
      JsonValue::Object props, pats, o;
      for (auto p : named) (p->kind == PatternKind::Key ? props : pats).emplace(p->text, JsonValue(true));
      if (!props.empty()) o.emplace("properties", JsonValue(std::move(props)));
      if (!pats.empty()) o.emplace("patternProperties", JsonValue(std::move(pats)));
      o.emplace("additionalProperties", std::move(s));
      return JsonValue(std::move(o));
    }
    default: break;
  }
  JsonValue::Object p;
  p.emplace(pattern_to_regex(e), std::move(s));
  return obj1("patternProperties", JsonValue(std::move(p)));
}

JsonValue string_json(Pattern e) {
  switch (e->kind) {
    case PatternKind::Regex: return obj1("pattern", e->text);
    case PatternKind::Key: return obj1("pattern", key_regex(e->text));
    case PatternKind::MinLen: return obj1("minLength", JsonValue(Decimal(static_cast<long>(e->n))));
    case PatternKind::MaxLen: return obj1("maxLength", JsonValue(Decimal(static_cast<long>(e->n))));
    case PatternKind::Not: return obj1("not", typed("string", string_json(e->kids[0])));
    case PatternKind::All:
    case PatternKind::Any: {
      if (e->kids.empty())
        return e->kind == PatternKind::All ? JsonValue(true) : obj1("not", obj1("type", "string"));
      std::vector<JsonValue> xs;
      for (auto k : e->kids) xs.push_back(string_json(k));
      return obj1(e->kind == PatternKind::All ? "allOf" : "anyOf", arr(std::move(xs)));
    }
  }
  return JsonValue(true);
}

JsonValue ref_json(const CRef& c) {
  std::vector<JsonValue> xs;
  for (auto& r : c.members()) {
    JsonValue one = obj1("$ref", def_pointer(r.uri));
    xs.push_back(r.neg ? obj1("not", std::move(one)) : std::move(one));
  }
  if (xs.empty()) return JsonValue(true);
  if (xs.size() == 1) return std::move(xs[0]);
  return obj1("allOf", arr(std::move(xs)));
}

JsonValue num(const Decimal& q) { return JsonValue(q); }

}  // namespace

JsonValue serialize_schema(const Schema& s) {
  auto list = [&](const char* name, bool empty_is_true) {
    if (s->kids.empty()) return JsonValue(empty_is_true);
    std::vector<JsonValue> xs;
    for (auto& k : s->kids) xs.push_back(serialize_schema(k));
    return obj1(name, arr(std::move(xs)));
  };
  switch (s->op) {
    case Op::Type: {
      auto ms = s->types.members();
      if (ms.empty()) return JsonValue(false);
      if (ms.size() == 1) return obj1("type", type_name(ms[0]));
      std::vector<JsonValue> names;
      for (auto t : ms) names.emplace_back(type_name(t));
      return obj1("type", arr(std::move(names)));
    }
    case Op::Const: return obj1("const", s->value);
    case Op::NotConst: return obj1("not", obj1("const", s->value));
    case Op::Ref: return ref_json(s->ref);
    case Op::True: return JsonValue(true);
    case Op::False: return JsonValue(false);
    case Op::AllOf: return list("allOf", true);
    case Op::AnyOf: return list("anyOf", false);
    case Op::OneOf: return list("oneOf", false);
    case Op::Not: return obj1("not", serialize_schema(s->kids[0]));
    case Op::PProp: return pprop_json(s->pattern, serialize_schema(s->kids[0]));
    case Op::PReq: {
      if (s->kids[0]->op == Op::True && s->pattern->kind == PatternKind::Key)
        return obj1("required", arr({JsonValue(s->pattern->text)}));
      return obj1("not", typed("object", pprop_json(s->pattern, obj1("not", serialize_schema(s->kids[0])))));
    }
    case Op::MinProps: return obj1("minProperties", num(Decimal(static_cast<long>(s->n))));
    case Op::MaxProps: return obj1("maxProperties", num(Decimal(static_cast<long>(s->n))));
    case Op::Item: {
      auto xs = trues(s->n);
      xs.as_array().push_back(serialize_schema(s->kids[0]));
      return obj1("items", std::move(xs));
    }
    case Op::AdditionalItems: {
      if (s->n == 0) return obj1("items", serialize_schema(s->kids[0]));
      JsonValue::Object o;
      o.emplace("items", trues(s->n));
      o.emplace("additionalItems", serialize_schema(s->kids[0]));
      return JsonValue(std::move(o));
    }
    case Op::ContainsAfter: {
      if (s->n == 0) return obj1("contains", serialize_schema(s->kids[0]));
      JsonValue::Object o;
      o.emplace("type", "array");
      o.emplace("items", trues(s->n));
      o.emplace("additionalItems", obj1("not", serialize_schema(s->kids[0])));
      return obj1("not", JsonValue(std::move(o)));
    }
    case Op::MinIts: return obj1("minItems", num(Decimal(static_cast<long>(s->n))));
    case Op::MaxIts: return obj1("maxItems", num(Decimal(static_cast<long>(s->n))));
    case Op::UniqueIts: return obj1("uniqueItems", true);
    case Op::NotUniqueIts: return obj1("not", typed("array", obj1("uniqueItems", true)));
    case Op::Minimum: return obj1("minimum", num(s->q));
    case Op::ExMin: return obj1("exclusiveMinimum", num(s->q));
    case Op::Maximum: return obj1("maximum", num(s->q));
    case Op::ExMax: return obj1("exclusiveMaximum", num(s->q));
    case Op::MultipleOf: return obj1("multipleOf", num(s->q));
    case Op::NotMultipleOf: return obj1("not", typed("number", obj1("multipleOf", num(s->q))));
    case Op::Pattern: return string_json(s->pattern);
  }
  return JsonValue(true);
}

JsonValue serialize(const Document& doc) {
  JsonValue root = serialize_schema(doc.root);
  auto& b = doc.env.bindings();
  if (b.empty()) return root;
  JsonValue::Object defs;
  for (auto& [uri, body] : b) defs.emplace(uri, serialize_schema(body));
  if (!root.is_object() || root.find("definitions")) root = obj1("allOf", arr({std::move(root)}));
  root.as_object().emplace("definitions", JsonValue(std::move(defs)));
  return root;
}

Document parse_schema(const JsonValue& json, const ParseOptions& opts) {
  Document doc;
  Translator t(json, opts, doc.env);
  doc.root = t.run();
  if (opts.check_well_formed) {
    auto diags = well_formed(doc);
    for (auto& d : diags) {
      if (d.kind == DiagKind::UnboundRef) throw Error(ErrorKind::UnresolvableRef, d.message);
      throw Error(ErrorKind::MalformedSchema, d.message);
    }
  }
  return doc;
}

void not_complete(Document& doc) { doc.env.not_complete(); }

std::size_t json_schema_size(const JsonValue& doc) { return doc.size(); }

}  // namespace refnorm

namespace refnorm {

namespace {

JsonValue rename_one_of(const JsonValue& s);

JsonValue rename_map(const JsonValue& m) {
  if (!m.is_object()) return m;
  JsonValue::Object out;
  for (auto& [k, v] : m.as_object()) out.emplace(k, rename_one_of(v));
  return out;
}

JsonValue rename_list(const JsonValue& a) {
  if (!a.is_array()) return rename_one_of(a);
  JsonValue::Array out;
  for (auto& v : a.as_array()) out.push_back(rename_one_of(v));
  return out;
}

JsonValue rename_one_of(const JsonValue& s) {
  if (!s.is_object()) return s;
  JsonValue::Object out;
  for (auto& [k, v] : s.as_object()) {
    if (k == "properties" || k == "patternProperties" || k == "definitions") {
      out.emplace(k, rename_map(v));
    } else if (k == "dependencies") {
      // array values are property lists, not schemas
      JsonValue::Object deps;
      if (v.is_object()) {
        for (auto& [dk, dv] : v.as_object()) deps.emplace(dk, dv.is_array() ? dv : rename_one_of(dv));
        out.emplace(k, std::move(deps));
      } else {
        out.emplace(k, v);
      }
    } else if (k == "items" || k == "allOf" || k == "anyOf" || k == "oneOf") {
      out.emplace(k == "oneOf" ? "anyOf" : k, rename_list(v));
    } else if (k == "additionalItems" || k == "additionalProperties" || k == "contains" || k == "propertyNames" ||
               k == "not") {
      out.emplace(k, rename_one_of(v));
    } else {
      out.emplace(k, v);
    }
  }
  // a schema with both keys keeps the conjunction
  if (s.find("oneOf") && s.find("anyOf")) {
    JsonValue both = rename_list(*s.find("oneOf"));
    out.erase("anyOf");
    JsonValue::Array all;
    JsonValue::Object a1, a2;
    a1.emplace("anyOf", rename_list(*s.find("anyOf")));
    a2.emplace("anyOf", std::move(both));
    all.push_back(std::move(a1));
    all.push_back(std::move(a2));
    if (auto* prev = s.find("allOf"); prev && prev->is_array())
      for (auto& v : prev->as_array()) all.push_back(rename_one_of(v));
    out["allOf"] = std::move(all);
  }
  return out;
}

}  // namespace

JsonValue one_of_to_any_of(const JsonValue& schema) { return rename_one_of(schema); }

}  // namespace refnorm
