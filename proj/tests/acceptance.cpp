// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "refnorm/synth.hpp"
#include "support/draft6_suite.hpp"
#include "support/family.hpp"

using namespace refnorm;
using namespace refnorm::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

// NotIncluded witnesses from every suite, re-checked by criterion 2
struct WitnessRecord {
  std::string suite;
  JsonValue left, right, witness;
};
std::vector<WitnessRecord> g_witnesses;

void record(const std::string& suite, const JsonValue& l, const JsonValue& r, const InclusionResult& res) {
  if (res.verdict == Verdict::NotIncluded && res.witness) g_witnesses.push_back({suite, l, r, *res.witness});
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

Outcome criterion1() {
  std::vector<std::string> gaps;
  if (auto g = family_string_coverage_gap(); !g.empty()) gaps.push_back("strings: " + g);
  if (auto g = family_number_coverage_gap(); !g.empty()) gaps.push_back("numbers: " + g);

  Rng rng(12345);
  UniverseParams u = family_universe();
  int agree = 0, included = 0, errors = 0;
  std::string first_miss;
  auto t0 = Clock::now();
  const int kPairs = 1000;
  for (int i = 0; i < kPairs; ++i) {
    auto [l, r] = family_pair(rng);
    SchemaPair p = combine(l, r);
    InclusionResult res = check_inclusion(p.env, p.left, p.right);
    record("oracle-family", l, r, res);
    if (res.verdict == Verdict::Error) {
      ++errors;
      if (first_miss.empty()) first_miss = "pair " + std::to_string(i) + ": " + res.error;
      continue;
    }
    OracleResult o = oracle_included(p.left, p.right, p.env, u);
    bool ours = res.verdict == Verdict::Included;
    included += ours;
    if (ours == o.included) ++agree;
    else if (first_miss.empty())
      first_miss = "pair " + std::to_string(i) + ": " + dump_json(l, -1) + " <: " + dump_json(r, -1);
  }
  double secs = seconds_since(t0);
  Outcome out;
  out.pass = agree == kPairs && gaps.empty() && secs < 300;
  out.detail = std::to_string(agree) + "/" + std::to_string(kPairs) + " agree with the oracle (" +
               std::to_string(included) + " Included, " + std::to_string(errors) + " errors), " + fmt(secs) + " s";
  if (!gaps.empty()) out.detail += "; universe gap " + gaps.front();
  if (!first_miss.empty()) out.detail += "; first miss " + first_miss;
  return out;
}

Outcome criterion3() {
  Rng rng(777);
  UniverseParams u = family_universe();
  long values = 0, bad = 0;
  std::string first;
  auto t0 = Clock::now();
  const int kDocs = 500;
  for (int i = 0; i < kDocs; ++i) {
    JsonValue doc = family_document(rng);
    Document d = parse_schema(doc);
    Document p = d;
    expand_oneof(p);
    stratify(p);
    p.env.not_complete();
    NormContext ctx(p.env);
    Dnf r = ctx.all_cs(c_true(), p.root);
    for_each_profile_value(u, {d.root, p.root}, {&d.env, &p.env}, [&](const JsonValue& j) {
      ++values;
      if (satisfies(j, d.root, d.env) != satisfies(j, r, p.env)) {
        if (!bad++) first = "doc " + std::to_string(i) + " at " + dump_json(j, -1);
      }
      return true;
    });
  }
  Outcome out;
  out.pass = bad == 0;
  out.detail = std::to_string(kDocs) + " documents, " + std::to_string(values) + " universe representatives, " +
               std::to_string(bad) + " disagreements, " + fmt(seconds_since(t0)) + " s";
  if (!first.empty()) out.detail += "; first " + first;
  return out;
}

// least-squares slope of log y against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

Outcome criterion4() {
  Rng rng(4);
  std::vector<double> nodes, steps;
  int ok = 0;
  const int kJudgments = 200;
  for (int i = 0; i < kJudgments; ++i) {
    auto [l, r] = rule_provable_pair(rng, 1 + i % 50);
    InclusionResult res = check_inclusion(l, r);
    record("rule-provable", l, r, res);
    if (res.verdict == Verdict::Included && !res.generation_invoked) ++ok;
    nodes.push_back(static_cast<double>(json_schema_size(l) + json_schema_size(r)));
    steps.push_back(static_cast<double>(std::max<std::uint64_t>(1, res.stats.steps)));
  }
  double slope = loglog_slope(nodes, steps);
  Outcome out;
  out.pass = ok == kJudgments && slope <= 1.15;
  out.detail = std::to_string(ok) + "/" + std::to_string(kJudgments) +
               " Included without generation, log-log step exponent " + fmt(slope);
  return out;
}

Outcome criterion5() {
  const int grid[] = {2, 4, 6, 8, 10};
  std::map<std::pair<int, int>, std::uint64_t> steps;
  int included = 0, total = 0;
  double slowest = 0;
  for (int n : grid)
    for (int m : grid) {
      SynthPair p = synthesize(SynthFamily::SelfIncl, n, m);
      InclusionResult res = check_inclusion(p.left, p.right);
      ++total;
      included += res.verdict == Verdict::Included;
      slowest = std::max(slowest, res.elapsed_ms);
      steps[{n, m}] = res.stats.steps;
    }
  double worst_ratio = 0;
  for (int m : grid)
    for (int i = 0; i + 1 < 5; ++i)
      worst_ratio = std::max(worst_ratio, double(steps[{grid[i + 1], m}]) / double(steps[{grid[i], m}]));
  std::uint64_t top = steps[{10, 10}];
  Outcome out;
  out.pass = included == total && top <= 1'000'000 && slowest < 1000 && worst_ratio < 4;
  out.detail = std::to_string(included) + "/" + std::to_string(total) + " Included, steps at n=m=10: " +
               std::to_string(top) + " (naive DNF 1e10 disjuncts), slowest " + fmt(slowest) +
               " ms, max steps(n+2)/steps(n) " + fmt(worst_ratio);
  return out;
}

Outcome criterion6() {
  Rng rng(66);
  int equivalent = 0;
  for (int i = 0; i < 50; ++i) {
    JsonValue s = exclusive_oneof(rng, 2 + i % 6);
    JsonValue t = one_of_to_any_of(s);
    EquivalenceResult e = check_equivalence(s, t);
    record("oneof-exclusive", s, t, e.left_in_right);
    record("oneof-exclusive", t, s, e.right_in_left);
    equivalent += e.verdict == Equivalence::Equivalent;
  }
  int asymmetric = 0;
  for (int i = 0; i < 10; ++i) {
    JsonValue s = overlapping_oneof(rng, 2 + i % 3);
    JsonValue t = one_of_to_any_of(s);
    InclusionResult fwd = check_inclusion(s, t), back = check_inclusion(t, s);
    record("oneof-overlapping", t, s, back);
    bool valid = back.witness && satisfies(*back.witness, parse_schema(t)) && !satisfies(*back.witness, parse_schema(s));
    asymmetric += fwd.verdict == Verdict::Included && back.verdict == Verdict::NotIncluded && valid;
  }
  Outcome out;
  out.pass = equivalent == 50 && asymmetric == 10;
  out.detail = std::to_string(equivalent) + "/50 exclusive schemas Equivalent to their anyOf twin, " +
               std::to_string(asymmetric) + "/10 overlapping schemas NotIncluded only anyOf->oneOf with a valid witness";
  return out;
}

Outcome criterion7() {
  Env env;
  env.bind("x", s_all({s_type(JsonType::Object), s_preq(p_key("a"), s_ref("x"))}));
  InclusionResult unsat = check_inclusion(env, s_ref("x"), s_false(), Budget{10'000, 600});
  InclusionResult self = check_inclusion(env, s_ref("x"), s_ref("x"));

  // the same pair written as Draft-06
  JsonValue doc = parse_json(R"({"definitions":{"x":{"type":"object","required":["a"],
      "properties":{"a":{"$ref":"#/definitions/x"}}}},"$ref":"#/definitions/x"})");
  InclusionResult unsat_json = check_inclusion(doc, JsonValue(false), Budget{10'000, 600});

  Outcome out;
  out.pass = unsat.verdict == Verdict::Included && unsat.generation_invoked && unsat.stats.steps <= 10'000 &&
             self.verdict == Verdict::Included && unsat_json.verdict == Verdict::Included;
  out.detail = std::string("x <: false ") + verdict_name(unsat.verdict) + " via generation=" +
               (unsat.generation_invoked ? "yes" : "no") + " in " + std::to_string(unsat.stats.steps) +
               " steps, ref(x) <: ref(x) " + verdict_name(self.verdict) + ", Draft-06 form " +
               verdict_name(unsat_json.verdict);
  return out;
}

void collect_synth_witnesses() {
  for (int n : {1, 2, 3, 5}) {
    SynthPair p = synthesize(SynthFamily::RecDepth, n, 1);
    record("recDepth", p.right, p.left, check_inclusion(p.right, p.left));
  }
  std::string dir = std::string(REFNORM_TEST_DATA) + "/pizza/";
  JsonValue so = parse_json_file(dir + "S_o.json"), sa = parse_json_file(dir + "S_a.json");
  JsonValue sos = parse_json_file(dir + "S_o_string.json"), sas = parse_json_file(dir + "S_a_string.json");
  record("pizza", sa, so, check_inclusion(sa, so));
  record("pizza", sas, sos, check_inclusion(sas, sos));
}

// Feeds JSON lines to the Python reference validator; returns failures or
// -1 when it could not be run.
int run_reference(const std::vector<JsonValue>& lines, std::string& summary) {
  auto path = std::filesystem::temp_directory_path() / ("refnorm_witnesses_" + std::to_string(::getpid()) + ".jsonl");
  {
    std::ofstream out(path);
    for (auto& l : lines) out << dump_json(l, -1) << "\n";
  }
  std::string cmd = std::string("'") + REFNORM_PYTHON + "' '" + REFNORM_SOURCE_DIR + "/tests/tools/draft6_check.py' < '" +
                    path.string() + "' 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return -1;
  std::string text;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) text.append(buf, n);
  int status = pclose(p);
  std::filesystem::remove(path);
  int failures = 0;
  std::istringstream is(text);
  bool summary_seen = false;
  for (std::string line; std::getline(is, line);) {
    if (line.rfind("checked ", 0) == 0) summary_seen = true;
    else if (line.find(" FAIL") != std::string::npos && ++failures == 1) summary = line;
  }
  if (!summary_seen) {
    summary = text.substr(0, 200);
    return -1;
  }
  return status == 0 ? failures : std::max(failures, 1);
}

Outcome criterion2() {
  collect_synth_witnesses();
  int internal_ok = 0;
  std::vector<JsonValue> original, round_trip;
  std::map<std::string, int> per_suite;
  for (std::size_t i = 0; i < g_witnesses.size(); ++i) {
    auto& w = g_witnesses[i];
    ++per_suite[w.suite];
    Document l = parse_schema(w.left), r = parse_schema(w.right);
    JsonValue l2 = serialize(l), r2 = serialize(r);
    bool ok = satisfies(w.witness, l) && !satisfies(w.witness, r) && satisfies(w.witness, parse_schema(l2)) &&
              !satisfies(w.witness, parse_schema(r2));
    internal_ok += ok;
    std::string id = w.suite + "#" + std::to_string(i);
    original.push_back(JsonValue::Object{{"id", id}, {"left", w.left}, {"right", w.right}, {"witness", w.witness}});
    round_trip.push_back(JsonValue::Object{{"id", id}, {"left", l2}, {"right", r2}, {"witness", w.witness}});
  }
  std::string why1, why2;
  int ref1 = run_reference(original, why1), ref2 = run_reference(round_trip, why2);

  Outcome out;
  int total = static_cast<int>(g_witnesses.size());
  out.pass = total > 0 && internal_ok == total && ref1 == 0 && ref2 == 0;
  std::string suites;
  for (auto& [s, n] : per_suite) suites += (suites.empty() ? "" : ", ") + s + " " + std::to_string(n);
  auto ref_text = [](int f, const std::string& why) {
    return f < 0 ? "unavailable (" + why + ")" : std::to_string(f) + " failures" + (why.empty() ? "" : " (" + why + ")");
  };
  out.detail = std::to_string(internal_ok) + "/" + std::to_string(total) + " witnesses valid internally [" + suites +
               "]; reference validator on originals: " + ref_text(ref1, why1) +
               "; on serialized round-trips: " + ref_text(ref2, why2);
  return out;
}

Outcome criterion8() {
  std::string dir = std::string(REFNORM_TEST_DATA) + "/draft6";
  auto groups = run_draft6_suite(dir);
  auto manifest = read_unsupported_manifest(dir + "/UNSUPPORTED.tsv");
  std::sort(manifest.begin(), manifest.end());
  std::vector<std::string> rejected;
  int tests = 0, agreed = 0, skipped_tests = 0;
  for (auto& g : groups) {
    if (!g.supported) {
      rejected.push_back(manifest_key(g));
      skipped_tests += g.tests;
      continue;
    }
    tests += g.tests;
    agreed += g.agreed;
  }
  std::sort(rejected.begin(), rejected.end());
  Outcome out;
  out.pass = tests > 0 && agreed == tests && rejected == manifest;
  out.detail = std::to_string(agreed) + "/" + std::to_string(tests) + " supported tests agree; " +
               std::to_string(rejected.size()) + " groups (" + std::to_string(skipped_tests) +
               " tests) unsupported, manifest " + (rejected == manifest ? "matches" : "DOES NOT match");
  return out;
}

}  // namespace

int main() {
  std::vector<std::pair<int, Outcome>> results;
  auto run = [&](int n, Outcome (*f)()) {
    std::cerr << "running criterion " << n << "...\n";
    Outcome o;
    try {
      run_with_stack([&] { o = f(); });
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    results.emplace_back(n, o);
  };
  // 2 last: it re-checks the witnesses the others produced
  run(1, criterion1);
  run(3, criterion3);
  run(4, criterion4);
  run(5, criterion5);
  run(6, criterion6);
  run(7, criterion7);
  run(8, criterion8);
  run(2, criterion2);
  std::sort(results.begin(), results.end(), [](auto& a, auto& b) { return a.first < b.first; });

  bool all = true;
  for (auto& [n, o] : results) {
    std::cout << "Criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "\n";
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
