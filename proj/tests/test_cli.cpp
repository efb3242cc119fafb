#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "run_config.hpp"
#include "study.hpp"

namespace fs = std::filesystem;
using namespace dofde::cli;

namespace {

struct RunResult {
  int code = -1;
  std::string output;
};

// Runs the installed CLI binary with stderr folded into stdout.
RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(DOFDE_CLI_BIN) + " " + args + " 2>&1";
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[512];
  while (std::fgets(buf, sizeof(buf), p)) r.output += buf;
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::path("cliwork") / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("rate annotation: doubling steps, group boundaries, plateau rows") {
  std::vector<StudyRow> rows;
  for (int k = 0; k < 4; ++k) {
    StudyRow r;
    r.scheme = "a";
    r.gamma = 1.0;
    r.n = 10 << k;
    r.error = 1.0 / std::pow(8.0, k);  // third order
    rows.push_back(r);
  }
  StudyRow other;
  other.scheme = "b";
  other.gamma = 1.0;
  other.n = 20;
  other.error = 0.5;
  rows.push_back(other);  // new group: no rate against the previous row

  annotate_rates(rows);
  CHECK(!rows[0].has_rate);
  for (int k = 1; k < 4; ++k) {
    REQUIRE(rows[k].has_rate);
    CHECK(rows[k].rate == doctest::Approx(3.0));
  }
  CHECK(!rows[4].has_rate);
  CHECK(!rows[4].plateau);
  CHECK(asymptotic_rate(rows, 0, 4) == doctest::Approx(3.0));

  // A stalled row is flagged and excluded from the asymptotic estimate.
  StudyRow stall = rows[3];
  stall.n = rows[3].n * 2;
  stall.error = rows[3].error * 0.95;
  rows.insert(rows.begin() + 4, stall);
  annotate_rates(rows);
  CHECK(rows[4].plateau);
  CHECK(!rows[4].has_rate);
  CHECK(asymptotic_rate(rows, 0, 5) == doctest::Approx(3.0));
}

TEST_CASE("asymptotic rate is the median of the final three ratios") {
  std::vector<StudyRow> rows(5);
  double rates[] = {0.0, 1.0, 2.9, 3.2, 2.8};
  for (int k = 0; k < 5; ++k) {
    rows[k].scheme = "a";
    rows[k].n = 10 << k;
    rows[k].has_rate = k > 0;
    rows[k].rate = rates[k];
  }
  CHECK(asymptotic_rate(rows, 0, 5) == doctest::Approx(2.9));
  CHECK(std::isnan(asymptotic_rate(rows, 0, 1)));
}

TEST_CASE("run config: unknown keys, list forms, defaults") {
  RunConfig c;
  CHECK_THROWS_AS(c.apply_json({{"scenrio", "example1"}}), ConfigError);
  CHECK_THROWS_AS(c.apply_json({{"n", "twenty"}}), ConfigError);

  c.apply_json({{"scenario", "example1"},
                {"n", {20, 40}},
                {"scheme", "sdirk2"},
                {"gamma", 3.0},
                {"seed", 7}});
  CHECK(c.scenario == "example1");
  REQUIRE(c.ns.size() == 2);
  CHECK(c.ns[1] == 40);
  REQUIRE(c.schemes.size() == 1);
  CHECK(c.schemes[0] == "sdirk2");
  CHECK(c.gammas == std::vector<double>{3.0});
  CHECK(c.seed == 7);

  // Snapshot default: integer times up to the horizon, else the final time.
  CHECK(c.resolved_snapshots(3.0) == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(c.resolved_snapshots(0.5) == std::vector<double>{0.5});
  c.snapshots = {0.25};
  CHECK(c.resolved_snapshots(3.0) == std::vector<double>{0.25});
}

TEST_CASE("cli: config errors exit with code 2") {
  auto d = fresh_dir("badcfg");
  std::ofstream(d / "bad.json") << "{\"scenario\": \"example1\", \"frobnicate\": 1}\n";
  auto r = run_cli("solve-ode --config " + (d / "bad.json").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("frobnicate") != std::string::npos);

  CHECK(run_cli("solve-ode --scenario example1 --scheme not_a_scheme").code == 2);
  CHECK(run_cli("solve-ode --scenario table1").code == 2);
  CHECK(run_cli("compress --out " + d.string()).code == 2);
  CHECK(run_cli("frobnicate").code == 2);
}

TEST_CASE("cli: failed compression exits with code 3") {
  auto d = fresh_dir("neg");
  auto r = run_cli("compress --kernel multiterm:0.5:-1 --tol 1e-6 --out " + d.string() +
                   " --cache " + (d / "cache").string());
  CHECK(r.code == 3);
  CHECK(r.output.find("error") != std::string::npos);
}

TEST_CASE("cli: compress emits the kernel document and reports cache hits") {
  auto d1 = fresh_dir("compress1");
  auto d2 = fresh_dir("compress2");
  const std::string cache = (fs::path("cliwork") / "compress_cache").string();
  fs::remove_all(cache);

  auto first = run_cli("compress --kernel rl:0.7 --tol 1e-6 --out " + d1.string() +
                       " --cache " + cache);
  REQUIRE(first.code == 0);
  CHECK(first.output.find("computed") != std::string::npos);

  auto second = run_cli("compress --kernel rl:0.7 --tol 1e-6 --out " + d2.string() +
                        " --cache " + cache);
  REQUIRE(second.code == 0);
  CHECK(second.output.find("cache hit") != std::string::npos);

  // Same document either way, and a sweep table with one data row.
  std::string doc1, doc2;
  for (const auto& e : fs::directory_iterator(d1))
    if (e.path().filename().string().rfind("rl_", 0) == 0) doc1 = slurp(e.path());
  for (const auto& e : fs::directory_iterator(d2))
    if (e.path().filename().string().rfind("rl_", 0) == 0) doc2 = slurp(e.path());
  REQUIRE(!doc1.empty());
  CHECK(doc1 == doc2);
  CHECK(doc1.find("\"kernel_id\": \"rl:0.7:i1\"") != std::string::npos);

  auto lines = csv_lines(slurp(d1 / "compress.csv"));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "kernel,tolerance,m,l1_error");
  CHECK(split(lines[1])[0] == "rl:0.7:i1");
}

TEST_CASE("cli: validate-kernel writes one row per kernel and tolerance") {
  auto d = fresh_dir("validate");
  std::ofstream(d / "cfg.json") << R"({"kernel": "rl:0.5", "tolerances": [1e-13]})";
  auto r = run_cli("validate-kernel --config " + (d / "cfg.json").string() + " --out " +
                   d.string());
  REQUIRE(r.code == 0);

  auto lines = csv_lines(slurp(d / "validate.csv"));
  REQUIRE(lines.size() == 2);
  auto cells = split(lines[1]);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0] == "rl:0.5:i1");
  CHECK(std::stod(cells[1]) == 1e-13);
  CHECK(std::stoi(cells[2]) > 10);
  CHECK(std::stod(cells[3]) < 1e-4);
  CHECK(std::stod(cells[3]) > 0.0);
}

TEST_CASE("cli: solve-ode trajectory hits the analytical final value") {
  auto d = fresh_dir("ode");
  auto r = run_cli(
      "solve-ode --scenario example2 --scheme radau_iia_2 --n 32 --gamma 3 --tol 1e-13 --out " +
      d.string());
  REQUIRE(r.code == 0);

  auto lines = csv_lines(slurp(d / "trajectory.csv"));
  REQUIRE(lines.size() == 34);  // header + N + 1 nodes
  CHECK(lines[0] == "t,u,reference,abs_error");
  auto last = split(lines.back());
  CHECK(std::stod(last[0]) == 1.0);
  CHECK(std::stod(last[1]) == doctest::Approx(7.0).epsilon(1e-3));

  const std::string meta = slurp(d / "metadata.json");
  CHECK(meta.find("\"library_version\"") != std::string::npos);
  CHECK(meta.find("\"scenario\": \"example2\"") != std::string::npos);
  CHECK(meta.find("\"final_value\"") != std::string::npos);
}

TEST_CASE("cli: solve-pde snapshots are finite fields on the grid") {
  auto d = fresh_dir("pde");
  auto r = run_cli(
      "solve-pde --scenario geometric_eta --grid 8 --m 6 --tol 1e-13 --scheme sdirk2 "
      "--n 4 --t 0.5 --out " +
      d.string());
  REQUIRE(r.code == 0);

  auto lines = csv_lines(slurp(d / "snapshot_0.csv"));
  REQUIRE(lines.size() == 50);  // header + 7*7 interior nodes
  CHECK(lines[0] == "x,y,u");
  double mx = 0.0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    auto cells = split(lines[k]);
    REQUIRE(cells.size() == 3);
    const double u = std::stod(cells[2]);
    REQUIRE(std::isfinite(u));
    mx = std::max(mx, std::abs(u));
  }
  CHECK(mx > 0.0);
  CHECK(slurp(d / "metadata.json").find("\"seed\"") != std::string::npos);
}

TEST_CASE("cli: repeat runs produce byte-identical outputs") {
  auto d1 = fresh_dir("det1");
  auto d2 = fresh_dir("det2");
  const std::string args =
      "converge --scenario example2 --scheme implicit_euler --gamma 1 --n 8,16,32 "
      "--tol 1e-13 --out ";
  REQUIRE(run_cli(args + d1.string()).code == 0);
  REQUIRE(run_cli(args + d2.string()).code == 0);
  CHECK(slurp(d1 / "converge.csv") == slurp(d2 / "converge.csv"));

  // Metadata matches too, up to the echoed output directory itself.
  std::string m1 = slurp(d1 / "metadata.json");
  const std::string m2 = slurp(d2 / "metadata.json");
  const auto at = m1.find("det1");
  REQUIRE(at != std::string::npos);
  m1.replace(at, 4, "det2");
  CHECK(m1 == m2);

  auto lines = csv_lines(slurp(d1 / "converge.csv"));
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "scheme,gamma,N,h,error,observed_rate");
  CHECK(split(lines[1]).size() == 5);  // coarsest row: no rate cell content
  CHECK(std::stod(split(lines[3])[5]) == doctest::Approx(1.0).epsilon(0.3));
}
