#include <doctest.h>

#include "refnorm/engine.hpp"
#include "refnorm/witness.hpp"

using namespace refnorm;

namespace {

JsonValue j(const char* text) { return parse_json(text); }

JsonValue fixture(const std::string& name) { return parse_json_file(std::string(REFNORM_TEST_DATA) + "/" + name); }

Decimal dec(const char* s) { return Decimal::parse(s); }

NumberConj num(std::optional<NumBound> lo, std::optional<NumBound> hi) {
  NumberConj n;
  n.lo = lo;
  n.hi = hi;
  return n;
}

}  // namespace

TEST_CASE("satisfies follows the analytical semantics") {
  Document so = parse_schema(fixture("pizza/S_o.json"));
  Document sa = parse_schema(fixture("pizza/S_a.json"));
  CHECK_FALSE(satisfies(j(R"("margherita pizza")"), so));
  CHECK(satisfies(j(R"("margherita pizza")"), sa));
  CHECK(satisfies(j(R"("margherita deluxe")"), so));
  CHECK(satisfies(j(R"("cheese pizza")"), so));
  Env env;
  CHECK(satisfies(j("null"), s_minimum(Decimal(7)), env));
  CHECK(satisfies(j("[1,2,1]"), s_not_unique(), env));
  CHECK_FALSE(satisfies(j("[1,2,3]"), s_not_unique(), env));
  CHECK(satisfies(j("[1,1.0]"), s_not_unique(), env));
  CHECK(satisfies(j("7.5"), s_multiple_of(dec("2.5")), env));
}

TEST_CASE("gen_number") {
  NumberConj a = num(NumBound{Decimal(2), false}, NumBound{Decimal(10), false});
  a.mult = Decimal(3);
  CHECK(gen_number(a) == JsonValue(3));

  CHECK_FALSE(gen_number(num(NumBound{Decimal(5), true}, NumBound{Decimal(5), true})));

  NumberConj c = num(NumBound{dec("0.1"), false}, NumBound{dec("0.4"), false});
  c.mult = dec("0.1");
  c.not_mult = {dec("0.2")};
  auto w = gen_number(c);
  REQUIRE(w);
  CHECK((*w == JsonValue(dec("0.1")) || *w == JsonValue(dec("0.3"))));

  // no integers in (0, 1): falls to decimals
  auto open = gen_number(num(NumBound{Decimal(0), true}, NumBound{Decimal(1), true}));
  REQUIRE(open);
  CHECK(open->as_number() > Decimal(0));
  CHECK(open->as_number() < Decimal(1));

  // every integer is a multiple of 0.5; 0.1 is the nearest valid decimal
  NumberConj d;
  d.not_mult = {dec("0.5")};
  auto v = gen_number(d);
  REQUIRE(v);
  CHECK_FALSE(v->as_number().is_multiple_of(dec("0.5")));

  // period search: multiples of 1 between 0 and 30 avoiding 2, 3 and 5
  NumberConj e = num(NumBound{Decimal(2), false}, NumBound{Decimal(30), false});
  e.mult = Decimal(1);
  e.not_mult = {Decimal(2), Decimal(3), Decimal(5)};
  CHECK(gen_number(e) == JsonValue(7));
  e.hi = NumBound{Decimal(6), false};
  CHECK_FALSE(gen_number(e));
}

TEST_CASE("the pizza oneOf in both directions") {
  auto incl = check_inclusion(fixture("pizza/S_o.json"), fixture("pizza/S_a.json"));
  CHECK(incl.verdict == Verdict::Included);

  // without a type restriction null is a counterexample too
  auto rev = check_inclusion(fixture("pizza/S_a.json"), fixture("pizza/S_o.json"));
  REQUIRE(rev.verdict == Verdict::NotIncluded);
  Document so = parse_schema(fixture("pizza/S_o.json"));
  Document sa = parse_schema(fixture("pizza/S_a.json"));
  CHECK(satisfies(*rev.witness, sa));
  CHECK_FALSE(satisfies(*rev.witness, so));
  CHECK_FALSE(satisfies(JsonValue(nullptr), so));

  auto rev_s = check_inclusion(fixture("pizza/S_a_string.json"), fixture("pizza/S_o_string.json"));
  REQUIRE(rev_s.verdict == Verdict::NotIncluded);
  REQUIRE(rev_s.witness->is_string());
  const std::string& s = rev_s.witness->as_string();
  CHECK(s.rfind("margherita", 0) == 0);
  CHECK(s.size() >= 15);
  CHECK(s.substr(s.size() - 5) == "pizza");
  CHECK(rev_s.generation_invoked);

  auto eq = check_equivalence(fixture("pizza/S_o_string.json"), fixture("pizza/S_a_string.json"));
  CHECK(eq.verdict == Equivalence::RightNotInLeft);
}

TEST_CASE("judgments beyond the syntactic rules") {
  Env env;
  Schema s1 = s_type(JsonType::Number), s2 = s_type(JsonType::String);
  Schema lhs = s_pprop(p_key("a"), s_any({s1, s2}));
  Schema rhs = s_any({s_pprop(p_key("a"), s1), s_pprop(p_key("a"), s2)});
  CHECK(check_inclusion(env, lhs, rhs).verdict == Verdict::Included);
  CHECK(check_inclusion(env, rhs, lhs).verdict == Verdict::Included);

  Schema unsat = s_all({s_type(JsonType::Number), s_type(JsonType::String)});
  Schema only_a = s_pprop(p_not(p_key("a")), unsat);
  CHECK(check_inclusion(env, only_a, s_max_props(1)).verdict == Verdict::Included);
  auto r = check_inclusion(env, s_pprop(p_not(p_key("a")), s_type(JsonType::Null)), s_max_props(1));
  REQUIRE(r.verdict == Verdict::NotIncluded);
  CHECK(r.witness->as_object().size() == 2);
}

TEST_CASE("guarded recursion") {
  Env env;
  env.bind("x", s_all({s_type(JsonType::Object), s_preq(p_key("a"), s_ref("x"))}));
  auto r = check_inclusion(env, s_ref("x"), s_false(), Budget{10'000, 600});
  CHECK(r.verdict == Verdict::Included);
  CHECK(r.generation_invoked);
  CHECK(r.stats.steps <= 10'000);

  CHECK(check_inclusion(env, s_ref("x"), s_ref("x")).verdict == Verdict::Included);

  // a list type: inhabited, and a narrower element is a strict subtype
  Env lists;
  lists.bind("l", s_any({s_type(JsonType::Null),
                         s_all({s_type(JsonType::Array), s_item(0, s_type(JsonType::Number)), s_item(1, s_ref("l")),
                                s_max_its(2)})}));
  lists.bind("m", s_any({s_type(JsonType::Null),
                         s_all({s_type(JsonType::Array), s_item(0, s_all({s_type(JsonType::Number), s_multiple_of(Decimal(1))})), s_item(1, s_ref("m")),
                                s_max_its(2)})}));
  CHECK(check_inclusion(lists, s_ref("m"), s_ref("l")).verdict == Verdict::Included);
  auto w = check_inclusion(lists, s_ref("l"), s_ref("m"));
  REQUIRE(w.verdict == Verdict::NotIncluded);
  CHECK(satisfies(*w.witness, s_ref("l"), lists));
}

TEST_CASE("errors surface with their kind") {
  auto r = check_inclusion(j(R"({"unevaluatedProperties":false})"), j("true"));
  CHECK(r.verdict == Verdict::Error);
  REQUIRE(r.error_kind);
  CHECK(*r.error_kind == ErrorKind::UnsupportedKeyword);
  CHECK(r.error.find("unevaluatedProperties") != std::string::npos);

  auto b = check_inclusion(j(R"({"type":"object","required":["a","b","c"]})"), j(R"({"maxProperties":2})"),
                           Budget{5, 600});
  CHECK(b.verdict == Verdict::Error);
  CHECK(b.error_kind == ErrorKind::BudgetExceeded);
}

TEST_CASE("bounded oracle") {
  UniverseParams u;
  u.max_depth = 1;
  u.max_width = 1;
  u.keys = {"a"};
  u.strings = {"", "a"};
  u.numbers = {Decimal(0), Decimal(1)};
  auto vals = enumerate_universe(u);
  CHECK(vals.front() == JsonValue(nullptr));
  // 7 scalars, arrays of length 0..1, objects with "a" absent or bound
  CHECK(vals.size() == 7 + 1 + 7 + 1 + 7);

  Env env;
  auto r = oracle_included(s_true(), s_type(JsonType::Number), env, u);
  CHECK_FALSE(r.included);
  CHECK(r.counterexample == JsonValue(nullptr));
  CHECK(oracle_included(s_type(JsonType::Number), s_type(JsonType::Number), env, u).included);

  u.cap = 5;
  CHECK_THROWS_AS(enumerate_universe(u), Error);

  SchemaPair p = combine(fixture("pizza/S_a_string.json"), fixture("pizza/S_o_string.json"));
  auto probes = probe_strings({p.left, p.right}, p.env);
  UniverseParams su;
  su.max_depth = 0;
  su.strings = probes;
  auto c = oracle_included(p.left, p.right, p.env, su);
  REQUIRE_FALSE(c.included);
  CHECK(c.counterexample->as_string().find("margherita") == 0);
}
