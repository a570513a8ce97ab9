#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "refnorm/engine.hpp"

using namespace refnorm;

namespace {

const std::string kData = REFNORM_TEST_DATA;

struct Run {
  int code;
  std::string out;
};

// runs the CLI from the data directory so report paths stay relative
Run cli(const std::string& args) {
  std::string cmd = "cd '" + kData + "' && '" REFNORM_CLI "' " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

JsonValue masked(JsonValue v) {
  auto mask = [](JsonValue& row) { row.as_object()["elapsed_ms"] = 0; };
  if (v.is_array()) for (auto& r : v.as_array()) mask(r);
  else mask(v);
  return v;
}

Document report_schema() { return parse_schema(parse_json_file(REFNORM_SOURCE_DIR "/tools/report.schema.json")); }

}  // namespace

TEST_CASE("check: exit codes and golden reports") {
  Document meta = report_schema();

  Run a = cli("check pizza/S_o.json pizza/S_a.json --format json");
  CHECK(a.code == 0);
  JsonValue ra = parse_json(a.out);
  CHECK(satisfies(ra, meta));
  CHECK(masked(ra) == parse_json_file(kData + "/golden/check_o_in_a.json"));

  auto wpath = std::filesystem::temp_directory_path() / "refnorm_cli_witness.json";
  Run b = cli("check pizza/S_a.json pizza/S_o.json --format json --witness-out '" + wpath.string() + "'");
  CHECK(b.code == 1);
  JsonValue rb = parse_json(b.out);
  CHECK(satisfies(rb, meta));
  CHECK(masked(rb) == parse_json_file(kData + "/golden/check_a_in_o.json"));
  JsonValue w = parse_json_file(wpath.string());
  CHECK(satisfies(w, parse_schema(parse_json_file(kData + "/pizza/S_a.json"))));
  CHECK_FALSE(satisfies(w, parse_schema(parse_json_file(kData + "/pizza/S_o.json"))));

  // same inputs, same report apart from timing
  CHECK(masked(parse_json(cli("check pizza/S_a.json pizza/S_o.json --format json").out)) == masked(rb));

  Run stats = cli("check pizza/S_o.json pizza/S_a.json --format json --stats");
  JsonValue rs = parse_json(stats.out);
  CHECK(satisfies(rs, meta));
  REQUIRE(rs.find("stats"));
  CHECK(rs.find("stats")->find("steps"));
}

TEST_CASE("check: errors") {
  auto bad = std::filesystem::temp_directory_path() / "refnorm_cli_uneval.json";
  std::ofstream(bad) << R"({"unevaluatedProperties":false})";
  std::string cmd = "'" REFNORM_CLI "' check '" + bad.string() + "' '" + bad.string() + "' 2>&1 >/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[512] = {};
  std::string err(buf, fread(buf, 1, sizeof buf - 1, p));
  int status = pclose(p);
  CHECK(WEXITSTATUS(status) == 2);
  CHECK(err.find("unevaluatedProperties") != std::string::npos);

  CHECK(cli("check pizza/S_o.json pizza/S_a.json --steps 3").code == 3);
  Run r = cli("check pizza/S_o.json pizza/S_a.json --steps 3 --format json");
  CHECK(satisfies(parse_json(r.out), report_schema()));
}

TEST_CASE("batch") {
  Run r = cli("batch pizza/manifest.csv --format json --jobs 2");
  CHECK(r.code == 0);
  JsonValue rep = parse_json(r.out);
  CHECK(satisfies(rep, report_schema()));
  CHECK(masked(rep) == parse_json_file(kData + "/golden/batch_pizza.json"));

  CHECK(cli("batch pizza/manifest_missing.csv").code == 2);
  Run k = cli("batch pizza/manifest_missing.csv --keep-going --format json");
  CHECK(k.code == 0);
  JsonValue rows = parse_json(k.out);
  REQUIRE(rows.as_array().size() == 2);
  CHECK(rows.as_array()[1].find("verdict")->as_string() == "Error");
}

TEST_CASE("equiv, transform, validate") {
  CHECK(cli("equiv pizza/S_o_string.json pizza/S_a_string.json").out == "RightNotInLeft\n");
  CHECK(cli("equiv pizza/S_o.json pizza/S_o.json").code == 0);

  Run t = cli("transform one-to-any pizza/S_o.json");
  CHECK(t.code == 0);
  CHECK(parse_json(t.out) == parse_json(R"({"anyOf":[{"pattern":"^margherita"},{"pattern":"pizza$"}]})"));
  // no oneOf: same tree
  CHECK(parse_json(cli("transform one-to-any pizza/S_a.json").out) == parse_json_file(kData + "/pizza/S_a.json"));
  CHECK(cli("transform one-to-any pizza/manifest.csv").code == 2);

  CHECK(cli("validate pizza/S_a.json golden/check_o_in_a.json").out == "valid\n");
}

TEST_CASE("synth writes a manifest batch can run") {
  auto dir = std::filesystem::temp_directory_path() / "refnorm_cli_synth";
  std::filesystem::remove_all(dir);
  CHECK(cli("synth selfIncl '" + dir.string() + "' -n 2 -m 2").code == 0);
  CHECK(cli("synth oneofFan '" + dir.string() + "' -n 3").code == 0);
  CHECK(cli("synth recDepth '" + dir.string() + "' -n 1").code == 0);
  Run b = cli("batch '" + (dir / "manifest.csv").string() + "' --format json");
  CHECK(b.code == 0);
  JsonValue rows = parse_json(b.out);
  REQUIRE(rows.as_array().size() == 5);
  for (auto& row : rows.as_array()) CHECK(row.find("verdict")->as_string() == row.find("expected")->as_string());
  // selfIncl stays on the rule side
  CHECK(rows.as_array()[0].find("generation_invoked")->as_bool() == false);
}
