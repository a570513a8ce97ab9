#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "refnorm/engine.hpp"
#include "refnorm/synth.hpp"

using namespace refnorm;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kIncluded = 0, kNotIncluded = 1, kInputError = 2, kBudget = 3 };

struct Common {
  double timeout = 600;
  double steps = 5e7;  // double so 5e7 style input works
  std::string witness_out;
  bool stats = false;
  std::string format = "text";

  Budget budget() const { return Budget{static_cast<std::uint64_t>(steps), timeout}; }
};

void add_common(CLI::App* app, Common& c, bool witness) {
  app->add_option("--timeout", c.timeout, "seconds per check")->capture_default_str();
  app->add_option("--steps", c.steps, "step budget per check")->capture_default_str();
  if (witness) app->add_option("--witness-out", c.witness_out, "write the witness here when not included");
  app->add_flag("--stats", c.stats, "emit the counters as JSON");
  app->add_option("--format", c.format, "report format")->check(CLI::IsMember({"text", "json", "csv"}))->capture_default_str();
}

struct Row {
  std::string left, right, expected;
  InclusionResult result;
};

int exit_code_of(const InclusionResult& r) {
  switch (r.verdict) {
    case Verdict::Included: return kIncluded;
    case Verdict::NotIncluded: return kNotIncluded;
    case Verdict::Error: return r.error_kind == ErrorKind::BudgetExceeded ? kBudget : kInputError;
  }
  return kInputError;
}

JsonValue stats_json(const Stats& s) {
  JsonValue::Object o;
  for (auto& [k, v] : stats_map(s)) o[k] = JsonValue(Decimal(static_cast<long>(v)));
  return o;
}

JsonValue row_json(const Row& row) {
  const auto& r = row.result;
  JsonValue::Object o{
      {"left", row.left},
      {"right", row.right},
      {"verdict", verdict_name(r.verdict)},
      // microsecond resolution keeps the decimal short
      {"elapsed_ms", JsonValue(Decimal(std::lround(r.elapsed_ms * 1000)) / Decimal(1000))},
      {"steps", JsonValue(Decimal(static_cast<long>(r.stats.steps)))},
      {"fast_path_hits", JsonValue(Decimal(static_cast<long>(r.stats.fast_path_hits)))},
      {"crefs_created", JsonValue(Decimal(static_cast<long>(r.stats.crefs_created)))},
      {"generation_invoked", r.generation_invoked},
      {"error", r.verdict == Verdict::Error ? JsonValue(r.error) : JsonValue(nullptr)},
  };
  if (!row.expected.empty()) o["expected"] = row.expected;
  return o;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* kCsvHeader = "left,right,verdict,elapsed_ms,steps,fast_path_hits,crefs_created,generation_invoked,error";

std::string csv_row(const Row& row) {
  JsonValue j = row_json(row);
  auto num = [&](const char* k) { return dump_json(*j.find(k), -1); };
  std::ostringstream os;
  os << csv_field(row.left) << ',' << csv_field(row.right) << ',' << verdict_name(row.result.verdict) << ','
     << num("elapsed_ms") << ',' << num("steps") << ',' << num("fast_path_hits") << ',' << num("crefs_created")
     << ',' << (row.result.generation_invoked ? "true" : "false") << ','
     << csv_field(row.result.verdict == Verdict::Error ? row.result.error : "");
  if (!row.expected.empty()) os << ',' << csv_field(row.expected);
  return os.str();
}

void write_json_file(const std::string& path, const JsonValue& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << dump_json(v, 2) << "\n";
}

InclusionResult check_files(const std::string& left, const std::string& right, const Budget& budget) {
  InclusionResult r;
  JsonValue l, rr;
  try {
    l = parse_json_file(left);
    rr = parse_json_file(right);
  } catch (const std::exception& e) {
    r.verdict = Verdict::Error;
    r.error_kind = ErrorKind::MalformedSchema;
    r.error = e.what();
    return r;
  }
  return check_inclusion(l, rr, budget);
}

void report_error_line(const InclusionResult& r) {
  if (r.verdict == Verdict::Error) std::cerr << "refnorm: " << r.error << "\n";
}

int cmd_check(const std::string& left, const std::string& right, const Common& c) {
  Row row{left, right, "", check_files(left, right, c.budget())};
  const auto& r = row.result;
  report_error_line(r);
  if (r.witness && !c.witness_out.empty()) write_json_file(c.witness_out, *r.witness);

  if (c.format == "json") {
    JsonValue j = row_json(row);
    if (c.stats) j.as_object()["stats"] = stats_json(r.stats);
    std::cout << dump_json(j, 2) << "\n";
  } else {
    if (c.format == "csv") std::cout << kCsvHeader << "\n" << csv_row(row) << "\n";
    else {
      std::cout << verdict_name(r.verdict) << "\n";
      if (r.witness && c.witness_out.empty()) std::cout << "witness: " << dump_json(*r.witness, -1) << "\n";
    }
    if (c.stats) std::cout << dump_json(stats_json(r.stats), 2) << "\n";
  }
  return exit_code_of(r);
}

int cmd_equiv(const std::string& left, const std::string& right, const Common& c) {
  EquivalenceResult e;
  try {
    e = check_equivalence(parse_json_file(left), parse_json_file(right), c.budget());
  } catch (const std::exception& ex) {
    std::cerr << "refnorm: " << ex.what() << "\n";
    return kInputError;
  }
  Row lr{left, right, "", e.left_in_right}, rl{right, left, "", e.right_in_left};
  report_error_line(lr.result);
  report_error_line(rl.result);
  if (!c.witness_out.empty()) {
    JsonValue::Object w;
    if (lr.result.witness) w["left_not_in_right"] = *lr.result.witness;
    if (rl.result.witness) w["right_not_in_left"] = *rl.result.witness;
    write_json_file(c.witness_out, w);
  }
  if (c.format == "json") {
    JsonValue::Object o{{"verdict", equivalence_name(e.verdict)}, {"left_in_right", row_json(lr)},
                        {"right_in_left", row_json(rl)}};
    std::cout << dump_json(o, 2) << "\n";
  } else if (c.format == "csv") {
    std::cout << kCsvHeader << "\n" << csv_row(lr) << "\n" << csv_row(rl) << "\n";
  } else {
    std::cout << equivalence_name(e.verdict) << "\n";
  }
  if (c.stats) {
    Stats s = e.left_in_right.stats;
    s.steps += e.right_in_left.stats.steps;
    s.fast_path_hits += e.right_in_left.stats.fast_path_hits;
    s.fast_path_misses += e.right_in_left.stats.fast_path_misses;
    s.crefs_created += e.right_in_left.stats.crefs_created;
    std::cout << dump_json(stats_json(s), 2) << "\n";
  }
  if (e.verdict == Equivalence::Error) {
    bool budget = lr.result.error_kind == ErrorKind::BudgetExceeded || rl.result.error_kind == ErrorKind::BudgetExceeded;
    return budget ? kBudget : kInputError;
  }
  return e.verdict == Equivalence::Equivalent ? 0 : 1;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') out.back() += line[++i];
      else if (ch == '"') quoted = false;
      else out.back() += ch;
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.emplace_back();
    } else if (ch != '\r') {
      out.back() += ch;
    }
  }
  return out;
}

int cmd_batch(const std::string& manifest, const Common& c, int jobs, bool keep_going) {
  std::ifstream in(manifest);
  if (!in) {
    std::cerr << "refnorm: cannot open " << manifest << "\n";
    return kInputError;
  }
  fs::path base = fs::path(manifest).parent_path();
  std::vector<Row> rows;
  bool first = true;
  for (std::string line; std::getline(in, line);) {
    auto f = split_csv_line(line);
    bool header = first && f[0] == "left";
    first = false;
    if (header || (f.size() == 1 && f[0].empty())) continue;
    if (f.size() < 2 || f.size() > 3) {
      std::cerr << "refnorm: bad manifest line: " << line << "\n";
      return kInputError;
    }
    rows.push_back(Row{f[0], f[1], f.size() == 3 ? f[2] : "", {}});
  }

  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base / p).string(); };
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::vector<char> done(rows.size(), 0);
  auto worker = [&] {
    for (std::size_t i; !stop && (i = next++) < rows.size();) {
      rows[i].result = check_files(resolve(rows[i].left), resolve(rows[i].right), c.budget());
      done[i] = 1;
      if (rows[i].result.verdict == Verdict::Error && !keep_going) stop = true;
    }
  };
  std::vector<std::thread> pool;
  for (int k = 0; k < std::max(1, jobs); ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // rows after the first failure may have been skipped; report in manifest order
  std::vector<const Row*> ran;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (done[i]) ran.push_back(&rows[i]);

  if (c.format == "json") {
    JsonValue::Array a;
    for (auto* r : ran) a.push_back(row_json(*r));
    std::cout << dump_json(a, 2) << "\n";
  } else if (c.format == "csv") {
    bool any_expected = std::any_of(ran.begin(), ran.end(), [](const Row* r) { return !r->expected.empty(); });
    std::cout << kCsvHeader << (any_expected ? ",expected" : "") << "\n";
    for (auto* r : ran) std::cout << csv_row(*r) << "\n";
  } else {
    for (auto* r : ran) {
      std::cout << r->left << " <: " << r->right << "  " << verdict_name(r->result.verdict) << "  steps "
                << r->result.stats.steps;
      if (r->result.verdict == Verdict::Error) std::cout << "  " << r->result.error;
      std::cout << "\n";
    }
  }

  std::map<std::pair<std::string, std::string>, int> confusion;
  int errors = 0, budget_errors = 0;
  for (auto* r : ran) {
    if (r->result.verdict == Verdict::Error) {
      ++errors;
      if (r->result.error_kind == ErrorKind::BudgetExceeded) ++budget_errors;
    }
    if (!r->expected.empty()) ++confusion[{r->expected, verdict_name(r->result.verdict)}];
  }
  if (!confusion.empty()) {
    int agree = 0, total = 0;
    std::cerr << "expected -> actual\n";
    for (auto& [k, n] : confusion) {
      std::cerr << "  " << k.first << " -> " << k.second << ": " << n << "\n";
      total += n;
      if (k.first == k.second) agree += n;
    }
    std::cerr << "agreement " << agree << "/" << total << "\n";
  }
  if (c.stats) {
    Stats s;
    for (auto* r : ran) {
      s.steps += r->result.stats.steps;
      s.fast_path_hits += r->result.stats.fast_path_hits;
      s.fast_path_misses += r->result.stats.fast_path_misses;
      s.crefs_created += r->result.stats.crefs_created;
    }
    std::cerr << dump_json(stats_json(s), 2) << "\n";
  }
  if (errors == 0 || keep_going) return 0;
  return budget_errors == errors ? kBudget : kInputError;
}

int cmd_transform(const std::string& in, const std::string& out) {
  JsonValue v;
  try {
    v = parse_json_file(in);
  } catch (const std::exception& e) {
    std::cerr << "refnorm: " << e.what() << "\n";
    return kInputError;
  }
  JsonValue t = one_of_to_any_of(v);
  if (out.empty() || out == "-") std::cout << dump_json(t, 2) << "\n";
  else write_json_file(out, t);
  return 0;
}

int cmd_synth(const std::string& family, int n, int m, const std::string& dir) {
  SynthFamily f;
  if (!synth_family_from_name(family, f)) {
    std::cerr << "refnorm: unknown family " << family << " (selfIncl, oneofFan, recDepth)\n";
    return kInputError;
  }
  SynthPair p = synthesize(f, n, m);
  fs::create_directories(dir);
  std::string l = p.name + "_left.json", r = p.name + "_right.json";
  write_json_file((fs::path(dir) / l).string(), p.left);
  write_json_file((fs::path(dir) / r).string(), p.right);

  // appending lets several sizes share one manifest
  fs::path manifest = fs::path(dir) / "manifest.csv";
  bool fresh = !fs::exists(manifest);
  std::ofstream mf(manifest, std::ios::app);
  if (fresh) mf << "left,right,expected\n";
  auto verdict = [](bool incl) { return incl ? "Included" : "NotIncluded"; };
  mf << l << ',' << r << ',' << verdict(p.left_in_right) << "\n";
  if (p.left != p.right) mf << r << ',' << l << ',' << verdict(p.right_in_left) << "\n";
  std::cout << (fs::path(dir) / l).string() << "\n" << (fs::path(dir) / r).string() << "\n";
  return 0;
}

int cmd_validate(const std::string& schema, const std::string& instance) {
  try {
    Document d = parse_schema(parse_json_file(schema));
    bool ok = satisfies(parse_json_file(instance), d);
    std::cout << (ok ? "valid" : "invalid") << "\n";
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "refnorm: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"JSON Schema inclusion checker"};
  app.require_subcommand(1);
  int code = 0;

  Common check_opts;
  std::string left, right;
  auto* check = app.add_subcommand("check", "decide left <: right");
  check->add_option("left", left)->required()->check(CLI::ExistingFile);
  check->add_option("right", right)->required()->check(CLI::ExistingFile);
  add_common(check, check_opts, true);
  check->callback([&] { code = cmd_check(left, right, check_opts); });

  Common equiv_opts;
  auto* equiv = app.add_subcommand("equiv", "decide inclusion in both directions");
  equiv->add_option("left", left)->required()->check(CLI::ExistingFile);
  equiv->add_option("right", right)->required()->check(CLI::ExistingFile);
  add_common(equiv, equiv_opts, true);
  equiv->callback([&] { code = cmd_equiv(left, right, equiv_opts); });

  Common batch_opts;
  std::string manifest;
  int jobs = 1;
  bool keep_going = false;
  auto* batch = app.add_subcommand("batch", "run a CSV manifest of left,right[,expected]");
  batch->add_option("manifest", manifest)->required();
  batch->add_option("--jobs", jobs, "rows checked in parallel")->capture_default_str();
  batch->add_flag("--keep-going", keep_going, "record row errors and continue");
  add_common(batch, batch_opts, false);
  batch->callback([&] { code = cmd_batch(manifest, batch_opts, jobs, keep_going); });

  std::string in, out;
  auto* transform = app.add_subcommand("transform", "schema rewrites");
  transform->require_subcommand(1);
  auto* one_to_any = transform->add_subcommand("one-to-any", "rename every oneOf to anyOf");
  one_to_any->add_option("in", in)->required();
  one_to_any->add_option("out", out, "output file, stdout when omitted");
  one_to_any->callback([&] { code = cmd_transform(in, out); });

  std::string family, dir;
  int n = 1, m = 1;
  auto* synth = app.add_subcommand("synth", "write a synthetic benchmark pair");
  synth->add_option("family", family)->required()->check(CLI::IsMember({"selfIncl", "oneofFan", "recDepth"}));
  synth->add_option("out-dir", dir)->required();
  synth->add_option("-n", n)->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("-m", m)->check(CLI::PositiveNumber)->capture_default_str();
  synth->callback([&] { code = cmd_synth(family, n, m, dir); });

  std::string schema, instance;
  auto* validate = app.add_subcommand("validate", "check an instance against a schema");
  validate->add_option("schema", schema)->required();
  validate->add_option("instance", instance)->required();
  validate->callback([&] { code = cmd_validate(schema, instance); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  } catch (const std::exception& e) {
    std::cerr << "refnorm: " << e.what() << "\n";
    return kInputError;
  }
  return code;
}
