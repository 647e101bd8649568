#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "ecoimpact/commands.hpp"
#include "ecoimpact/error.hpp"
#include "json.hpp"

using namespace ecoimpact;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kFixtures{ECOIMPACT_FIXTURES};

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("ecoimpact_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream cell_in(line);
    std::string cell;
    while (std::getline(cell_in, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

AnalyzeArgs analyze_args(const fs::path& input, const fs::path& out) {
  AnalyzeArgs args;
  args.snapshot_path = input;
  args.out_dir = out;
  args.config.n_trials = 500;
  return args;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(exit_code_for(Error(ErrorKind::Parse, "x")) == 2);
  CHECK(exit_code_for(Error(ErrorKind::Ambiguity, "x")) == 2);
  CHECK(exit_code_for(Error(ErrorKind::Io, "x")) == 2);
  CHECK(exit_code_for(Error(ErrorKind::Domain, "x")) == 2);
  CHECK(exit_code_for(Error(ErrorKind::DegenerateScenario, "x")) == 3);
  CHECK(exit_code_for(Error(ErrorKind::Unreachable, "x")) == 3);
  CHECK(exit_code_for(std::runtime_error("x")) == 4);
}

TEST_CASE("cmd_ingest") {
  TempDir dir("ingest");
  const auto raw = dir.path / "three.ndjson";
  std::ofstream(raw) << "{\"name\": \"a\", \"requirements\": [\"b\"], \"maintained_score\": 1}\n"
                        "{\"name\": \"b\", \"requirements\": [\"c\"]}\n"
                        "{\"name\": \"c\"}\n";
  std::ostringstream out, err;
  IngestArgs args{raw, dir.path / "snap.json", {}};
  CHECK(cmd_ingest(args, out, err) == 0);
  const auto snapshot = read_snapshot(args.out_path);
  CHECK(snapshot.package_count() == 3);
  CHECK(snapshot.edge_count() == 2);
  CHECK(out.str().find("packages:                     3\n") != std::string::npos);
  CHECK(err.str().empty());

  args.raw_path = kFixtures / "collision.ndjson";
  std::ostringstream err2;
  CHECK(cmd_ingest(args, out, err2) == 2);
  CHECK(err2.str().find("collide") != std::string::npos);

  args.raw_path = dir.path / "missing.ndjson";
  CHECK(cmd_ingest(args, out, err2) == 2);
}

TEST_CASE("cmd_ingest summary equals a recount of a 10k corpus") {
  TempDir dir("corpus");
  std::mt19937_64 rng(79);
  const std::size_t n = 10000;
  auto name = [](std::size_t i) { return "Lib_" + std::to_string(i); };
  std::vector<bool> broken(n);
  for (std::size_t i = 0; i < n; ++i) broken[i] = rng() % 50 == 0;

  std::uint64_t specifiers = 0, unresolved = 0, of_broken = 0, optional = 0, self = 0;
  std::set<std::pair<std::size_t, std::size_t>> edges;
  std::uint64_t duplicates = 0;
  {
    std::ofstream raw(dir.path / "corpus.ndjson");
    for (std::size_t i = 0; i < n; ++i) {
      json reqs = json::array();
      const auto count = rng() % 5;
      for (std::size_t k = 0; k < count; ++k) {
        ++specifiers;
        const auto kind = rng() % 20;
        if (kind == 0) {
          reqs.push_back("missing-" + std::to_string(rng()) + ">=1");
          ++unresolved;
          continue;
        }
        const std::size_t target = rng() % n;
        const bool is_optional = kind == 1;
        reqs.push_back(name(target) + (is_optional ? " ; extra == 'dev'" : ""));
        if (broken[i] || broken[target]) {
          ++of_broken;
        } else if (is_optional) {
          ++optional;
        } else if (target == i) {
          ++self;
        } else if (!edges.emplace(i, target).second) {
          ++duplicates;
        }
      }
      json rec{{"name", name(i)}, {"requirements", reqs}, {"maintained_score", (rng() % 101) / 10.0}};
      if (broken[i]) rec["error"] = "not found";
      raw << rec.dump() << '\n';
    }
  }
  std::uint64_t broken_count = 0;
  for (bool b : broken) broken_count += b;

  std::ostringstream out, err;
  IngestArgs args{dir.path / "corpus.ndjson", dir.path / "snap.json", {}};
  args.build.include_optional = false;
  REQUIRE(cmd_ingest(args, out, err) == 0);
  const auto snapshot = read_snapshot(args.out_path);
  const auto& st = snapshot.filter_stats();
  CHECK(snapshot.package_count() == n - broken_count);
  CHECK(snapshot.edge_count() == edges.size());
  CHECK(st.raw_records == n);
  CHECK(st.unresolvable_records == broken_count);
  CHECK(st.raw_specifiers == specifiers);
  CHECK(st.unresolved_edges == unresolved);
  CHECK(st.edges_of_unresolvable_records == of_broken);
  CHECK(st.optional_edges_excluded == optional);
  CHECK(st.self_edges == self);
  CHECK(st.duplicate_edges == duplicates);
  CHECK(out.str().find("edges:                        " + std::to_string(edges.size()) + "\n") !=
        std::string::npos);
}

TEST_CASE("cmd_analyze writes deterministic outputs") {
  TempDir dir("analyze");
  auto args = analyze_args(kFixtures / "chain5.ndjson", dir.path / "a");
  args.config.threads = 1;
  std::ostringstream out, err;
  REQUIRE(cmd_analyze(args, out, err) == 0);
  for (const char* f : {"reach.csv", "pagerank.csv", "impact_improvement.csv", "impact_regression.csv",
                        "selection_improvement.csv", "selection_regression.csv", "selection_union.txt",
                        "selection_improvement.json", "selection_regression.json", "baseline.json", "manifest.json"}) {
    CHECK_MESSAGE(fs::exists(args.out_dir / f), f);
  }
  CHECK(slurp(args.out_dir / "selection_union.txt") == "core-lib\nhttp-core\ntext-utils\n");

  auto again = args;
  again.out_dir = dir.path / "b";
  again.config.threads = 3;
  std::ostringstream out2;
  REQUIRE(cmd_analyze(again, out2, err) == 0);
  for (const auto& entry : fs::directory_iterator(args.out_dir)) {
    CHECK_MESSAGE(slurp(entry.path()) == slurp(again.out_dir / entry.path().filename()), entry.path());
  }
  CHECK(out.str() == out2.str());

  // a serialized snapshot gives the same outputs as the raw records
  IngestArgs ingest{kFixtures / "chain5.ndjson", dir.path / "chain5.json", {}};
  REQUIRE(cmd_ingest(ingest, out, err) == 0);
  auto from_snapshot = args;
  from_snapshot.snapshot_path = ingest.out_path;
  from_snapshot.out_dir = dir.path / "c";
  REQUIRE(cmd_analyze(from_snapshot, out, err) == 0);
  CHECK(slurp(from_snapshot.out_dir / "baseline.json") == slurp(args.out_dir / "baseline.json"));
}

TEST_CASE("cmd_analyze at tau 1 lists every nonzero share") {
  TempDir dir("tau1");
  auto args = analyze_args(kFixtures / "chain5.ndjson", dir.path);
  args.config.tau = 1.0;
  std::ostringstream out, err;
  REQUIRE(cmd_analyze(args, out, err) == 0);
  for (const char* preset : {"improvement", "regression"}) {
    std::set<std::string> nonzero, selected;
    const auto impact_rows = csv_rows(slurp(dir.path / (std::string("impact_") + preset + ".csv")));
    for (std::size_t i = 1; i < impact_rows.size(); ++i) {
      if (impact_rows[i][4] != "0") nonzero.insert(impact_rows[i][0]);
    }
    const auto sel_rows = csv_rows(slurp(dir.path / (std::string("selection_") + preset + ".csv")));
    for (std::size_t i = 1; i < sel_rows.size(); ++i) selected.insert(sel_rows[i][1]);
    CHECK(nonzero == selected);
    CHECK(sel_rows.back()[3] == "1");
  }
}

TEST_CASE("cmd_analyze error exits") {
  TempDir dir("errors");
  std::ostringstream out, err;
  auto args = analyze_args(kFixtures / "chain5.ndjson", dir.path);
  args.config.tau = 0.0;
  CHECK(cmd_analyze(args, out, err) == 2);
  args.config.tau = 0.8;
  args.config.pagerank.damping = 1.0;
  CHECK(cmd_analyze(args, out, err) == 2);
  args.config.pagerank.damping = 0.85;
  args.config.n_trials = 0;
  CHECK(cmd_analyze(args, out, err) == 2);

  // all packages at 10: the improvement total is zero
  const auto flat = dir.path / "flat.ndjson";
  std::ofstream(flat) << "{\"name\": \"a\", \"maintained_score\": 10}\n{\"name\": \"b\", \"maintained_score\": 10}\n";
  args = analyze_args(flat, dir.path / "out");
  std::ostringstream err2;
  CHECK(cmd_analyze(args, out, err2) == 3);
  CHECK(err2.str().find("zero total impact") != std::string::npos);

  args = analyze_args(dir.path / "nope.json", dir.path / "out");
  CHECK(cmd_analyze(args, out, err) == 2);
  const auto bad = dir.path / "bad.ndjson";
  std::ofstream(bad) << "{\"name\": \"a\"\n";
  args = analyze_args(bad, dir.path / "out");
  CHECK(cmd_analyze(args, out, err) == 2);
}

TEST_CASE("cmd_compare") {
  TempDir dir("compare");
  CompareArgs args;
  args.snapshot_path = kFixtures / "chain5.ndjson";
  args.out_dir = dir.path / "none";
  std::ostringstream out, err;
  REQUIRE(cmd_compare(args, out, err) == 0);
  auto rows = csv_rows(slurp(args.out_dir / "strategies.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "impact-driven");
  for (const char* f : {"strategies.json", "comparison.json", "comparison.txt"}) CHECK(fs::exists(args.out_dir / f));

  const auto union_file = dir.path / "union.txt";
  std::ofstream(union_file) << "core-lib\nhttp-core\ntext-utils\n";
  args.set_paths = {union_file};
  args.out_dir = dir.path / "union";
  REQUIRE(cmd_compare(args, out, err) == 0);
  rows = csv_rows(slurp(args.out_dir / "strategies.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[2][0] == "union");
  CHECK(rows[2][4] == rows[1][4]);
  CHECK(rows[2][5] == rows[1][5]);

  args.set_paths = {dir.path / "absent.txt"};
  CHECK(cmd_compare(args, out, err) == 2);
}

TEST_CASE("cmd_compare rows equal an independent recomputation") {
  TempDir dir("mechanisms");
  CompareArgs args;
  args.snapshot_path = kFixtures / "chain5.ndjson";
  args.out_dir = dir.path;
  for (const char* f : {"tidelift-lifted.txt", "ecosystems.txt", "sponsors.txt"}) {
    args.set_paths.push_back(kFixtures / "sets" / f);
  }
  std::ostringstream out, err;
  REQUIRE(cmd_compare(args, out, err) == 0);

  // recompute from the raw fixture: reach by hand from the chain
  // app -> web-framework -> http-core -> text-utils -> core-lib
  const std::map<std::string, int> reach{{"app", 1}, {"web-framework", 2}, {"http-core", 3}, {"text-utils", 4},
                                         {"core-lib", 5}};
  const std::map<std::string, double> score{{"web-framework", 6}, {"http-core", 10}, {"text-utils", 9}, {"core-lib", 0}};
  double up_total = 0, down_total = 0;
  for (const auto& [n, m] : score) {
    up_total += (10 - m) * reach.at(n);
    down_total += -m * reach.at(n);
  }
  const auto doc = json::parse(slurp(dir.path / "strategies.json"));
  const auto& json_rows = doc.at("rows");
  REQUIRE(json_rows.size() == 4);
  const std::vector<std::vector<std::string>> members{
      {"app", "core-lib"}, {"http-core", "web-framework"}, {"core-lib", "text-utils"}};
  for (std::size_t s = 0; s < members.size(); ++s) {
    double up = 0, down = 0;
    for (const auto& n : members[s]) {
      if (!score.count(n)) continue;
      up += (10 - score.at(n)) * reach.at(n);
      down += -score.at(n) * reach.at(n);
    }
    const auto& row = json_rows[s + 1];
    CHECK(row.at("packages").get<int>() == static_cast<int>(members[s].size()));
    CHECK(row.at("improvement_share").get<double>() == doctest::Approx(up / up_total).epsilon(1e-15));
    CHECK(row.at("regression_share").get<double>() == doctest::Approx(down / down_total).epsilon(1e-15));
  }
  CHECK(json_rows[1].at("strategy").get<std::string>() == "tidelift-lifted");
  CHECK(doc.at("unresolved").at("tidelift-lifted") == json::array({"unknown-thing"}));
  CHECK(json_rows[3].at("single_maintainer_packages").get<int>() == 1);
  CHECK(json_rows[3].at("total_individuals").get<int>() == 3);
  CHECK(out.str().rfind("strategy,source,", 0) == 0);
}

TEST_CASE("CLI binary exit codes") {
  TempDir dir("cli");
  const std::string cli = ECOIMPACT_CLI;
  auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("--version") == 0);
  CHECK(run("") == 2);
  CHECK(run("analyze") == 2);
  CHECK(run("ingest " + (kFixtures / "chain5.ndjson").string() + " -o " + (dir.path / "s.json").string()) == 0);
  CHECK(run("ingest " + (kFixtures / "collision.ndjson").string() + " -o " + (dir.path / "c.json").string()) == 2);
  CHECK(run("analyze " + (dir.path / "s.json").string() + " --trials 100 -o " + (dir.path / "out").string()) == 0);
  CHECK(run("analyze " + (dir.path / "s.json").string() + " --tau 1.5 -o " + (dir.path / "out").string()) == 2);
  CHECK(run("serve") == 2);
}
