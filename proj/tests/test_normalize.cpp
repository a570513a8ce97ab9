#include <doctest.h>

#include "refnorm/canonical.hpp"
#include "refnorm/compat.hpp"
#include "refnorm/engine.hpp"
#include "refnorm/normalize.hpp"

using namespace refnorm;

namespace {

UniverseParams small_universe() {
  UniverseParams u;
  u.max_depth = 2;
  u.max_width = 2;
  u.keys = {"a", "b"};
  u.strings = {"", "a", "ab"};
  u.numbers = {Decimal(-1), Decimal::parse("0.5"), Decimal(0), Decimal(2), Decimal(3)};
  return u;
}

Document doc_of(const char* text) { return parse_schema(parse_json(text)); }

// root Dnf of a document after the usual preparation
Dnf normalize_root(Document d, Stats* st = nullptr) {
  expand_oneof(d);
  stratify(d);
  d.env.not_complete();
  NormContext ctx(d.env);
  Dnf r = ctx.all_cs(c_true(), d.root);
  if (st) *st = ctx.stats();
  return r;
}

}  // namespace

TEST_CASE("not_push complements pointwise") {
  const char* docs[] = {
      R"({"type":["string","null"]})",
      R"({"minimum":1,"exclusiveMaximum":3})",
      R"({"multipleOf":2})",
      R"({"const":2})",
      R"({"pattern":"^a"})",
      R"({"properties":{"a":{"type":"number"}},"required":["b"]})",
      R"({"items":[{"type":"string"}],"additionalItems":false})",
      R"({"contains":{"const":3},"minItems":1})",
      R"({"uniqueItems":true})",
      R"({"minProperties":1,"maxProperties":1})",
      R"({"anyOf":[{"type":"null"},{"items":{"type":"null"}}]})",
  };
  auto values = enumerate_universe(small_universe());
  for (auto* t : docs) {
    Document d = doc_of(t);
    stratify(d);
    d.env.not_complete();
    Schema n = not_push(d.root, d.env);
    Schema nn = not_push(n, d.env);
    for (auto& j : values) {
      bool s = satisfies(j, d.root, d.env);
      CHECK_MESSAGE(satisfies(j, n, d.env) == !s, t, " at ", dump_json(j, -1));
      CHECK_MESSAGE(satisfies(j, nn, d.env) == s, t, " at ", dump_json(j, -1));
    }
  }
}

TEST_CASE("stratify and oneOf expansion keep the meaning") {
  const char* docs[] = {
      R"({"oneOf":[{"type":"number"},{"minimum":1}]})",
      R"({"properties":{"a":{"items":{"type":"string"}}},"additionalProperties":{"type":"null"}})",
      R"({"definitions":{"t":{"anyOf":[{"type":"null"},{"items":[{"$ref":"#/definitions/t"}]}]}},"$ref":"#/definitions/t"})",
  };
  auto values = enumerate_universe(small_universe());
  for (auto* t : docs) {
    Document d = doc_of(t);
    Document e = d;
    expand_oneof(e);
    stratify(e);
    for (auto& j : values) CHECK_MESSAGE(satisfies(j, d) == satisfies(j, e), t, " at ", dump_json(j, -1));
  }
}

TEST_CASE("number conjunctions refute") {
  CHECK(normalize_root(doc_of(R"({"type":"number","minimum":2,"maximum":1})")).empty());
  CHECK(normalize_root(doc_of(R"({"type":"number","minimum":4,"maximum":5,"multipleOf":3})")).empty());
  CHECK(normalize_root(doc_of(R"({"type":"number","multipleOf":4,"not":{"multipleOf":2}})")).empty());
  CHECK(normalize_root(doc_of(R"({"type":"number","const":2,"not":{"const":2}})")).empty());
  CHECK_FALSE(normalize_root(doc_of(R"({"type":"number","minimum":2,"maximum":10,"multipleOf":3})")).empty());
}

TEST_CASE("strings, objects and arrays refute") {
  CHECK(normalize_root(doc_of(R"({"type":"string","pattern":"^a","not":{"pattern":"a"}})")).empty());
  CHECK(normalize_root(doc_of(R"({"type":"object","required":["a","b"],"maxProperties":1})")).empty());
  CHECK(normalize_root(doc_of(R"({"type":"object","properties":{"a":false},"required":["a"]})")).empty());
  CHECK(normalize_root(doc_of(R"({"type":"array","items":[true],"additionalItems":false,"minItems":2})")).empty());
  CHECK(normalize_root(doc_of(R"({"type":"array","items":{"type":"string"},"contains":{"type":"number"}})")).empty());
  CHECK_FALSE(normalize_root(doc_of(R"({"type":"object","required":["a"],"maxProperties":1})")).empty());
}

TEST_CASE("allOf[S, not S] collapses through the fast path") {
  Document d = doc_of(R"({"type":"object","properties":{"a":{"type":"number"},"b":{"type":"string"}},"required":["a"]})");
  Document both{d.env, s_all({d.root, s_not(d.root)})};
  Stats st;
  CHECK(normalize_root(both, &st).empty());
  CHECK(st.fast_path_hits > 0);
}

TEST_CASE("all_xx") {
  Env env;
  env.bind("x", s_type(JsonType::Number));
  env.bind("y", s_type(JsonType::String));
  env.bind("z", s_minimum(Decimal(1)));
  env.not_complete();
  NormContext ctx(env);
  CRef x(RefName{"x"}), y(RefName{"y"}), z(RefName{"z"});
  CHECK(ctx.is_false(ctx.all_xx(x, y)));
  CHECK(ctx.is_false(ctx.all_xx(x, CRef(RefName{"x", true}))));
  CHECK(ctx.all_xx(x, z) == x.join(z));
  CHECK(ctx.all_xx(CRef(), z) == z);
  CHECK(ctx.stats().crefs_created >= 2);
}

TEST_CASE("canonical forms keep their invariants") {
  Document d = doc_of(R"({"anyOf":[
      {"type":"object","properties":{"a":{"type":"number"}},"patternProperties":{"^b":{"type":"string"}},"required":["a","bb"]},
      {"type":"array","items":[{"type":"number"}],"contains":{"type":"string"},"minItems":1},
      {"type":"number","exclusiveMinimum":0,"multipleOf":0.5}]})");
  expand_oneof(d);
  stratify(d);
  d.env.not_complete();
  NormContext ctx(d.env);
  Dnf r = ctx.all_cs(c_true(), d.root);
  CHECK(r.size() >= 3);
  for (auto& c : r) {
    auto bad = check_invariants(c, ctx.x_false());
    CHECK_MESSAGE(bad.empty(), describe(c));
  }
}

TEST_CASE("budget exhaustion is an error, not a verdict") {
  Document d = doc_of(R"({"type":"object","properties":{"a":{"type":"number"}},"required":["a"]})");
  expand_oneof(d);
  stratify(d);
  d.env.not_complete();
  NormContext ctx(d.env, Budget{3, 600});
  try {
    ctx.all_cs(c_true(), d.root);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BudgetExceeded);
  }
}
