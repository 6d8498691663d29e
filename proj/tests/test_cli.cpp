#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "levinv/cli.hpp"
#include "levinv/problem.hpp"

namespace fs = std::filesystem;

namespace {

fs::path dir() {
  static const fs::path d = [] {
    const fs::path p = fs::temp_directory_path() / "levinv_test_cli";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::string path(const std::string& name) { return (dir() / name).string(); }

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "levinv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return levinv::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string without_wall_ms(const std::string& p) {
  std::string out;
  for (const auto& row : read_csv(p)) {
    for (std::size_t i = 0; i + 1 < row.size(); ++i) out += row[i] + ',';
    out += '\n';
  }
  return out;
}

const std::string& planted_500() {
  static const std::string p = [] {
    const std::string f = path("planted500.json");
    REQUIRE(run({"gen", "--n", "500", "--d", "5", "--seed", "3", "--out", f}) == 0);
    return f;
  }();
  return p;
}

}  // namespace

TEST_CASE("gen writes a loadable instance and manifest") {
  const std::string f = path("small.json");
  CHECK(run({"gen", "--n", "8", "--d", "2", "--seed", "7", "--out", f}) == 0);
  const levinv::ProblemInstance inst = levinv::load_instance(f);
  CHECK(inst.n == 8);
  CHECK(inst.d == 2);
  const auto m = nlohmann::json::parse(slurp(f + ".manifest.json"));
  CHECK(m["command"] == "gen");
  CHECK(m["seed"] == 7);
  CHECK(m["config"]["n"] == 8);
  CHECK(m["artifacts"][0] == f);
  CHECK(m.contains("started_utc"));
  CHECK(m.contains("tool_version"));
  CHECK(run({"solve", "--instance", f, "--trace", path("small.csv")}) == 0);
}

TEST_CASE("gen is deterministic and rejects bad flags") {
  const std::string a = path("det_a.json"), b = path("det_b.json");
  CHECK(run({"gen", "--n", "30", "--d", "3", "--seed", "9", "--out", a}) == 0);
  CHECK(run({"gen", "--n", "30", "--d", "3", "--seed", "9", "--out", b}) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(run({"gen", "--n", "1", "--d", "2", "--out", path("bad.json")}) == 2);
  CHECK(run({"gen", "--n", "8", "--d", "2", "--kappa", "0.5", "--out", path("bad.json")}) == 2);
  CHECK(run({"gen", "--n", "8", "--d", "2", "--b-floor", "1.5", "--out", path("bad.json")}) == 3);
  CHECK(run({"gen", "--n", "8", "--out", path("bad.json")}) == 2);
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({}) == 2);
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("manifest reproduces the run") {
  const std::string a = path("repro.json");
  CHECK(run({"gen", "--n", "40", "--d", "3", "--seed", "21", "--kappa", "100", "--out", a}) == 0);
  const auto m = nlohmann::json::parse(slurp(a + ".manifest.json"));
  const auto& c = m["config"];
  const std::string b = path("repro_again.json");
  CHECK(run({"gen", "--n", std::to_string(c["n"].get<int>()), "--d",
             std::to_string(c["d"].get<int>()), "--seed", std::to_string(m["seed"].get<int>()),
             "--kappa", levinv::format_double(c["kappa"].get<double>()), "--b-floor",
             levinv::format_double(c["b_floor"].get<double>()), "--pd-margin",
             levinv::format_double(c["pd_margin"].get<double>()), "--out", b}) == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("solve exact from a small random start") {
  const std::string t = path("exact.csv");
  CHECK(run({"solve", "--instance", planted_500(), "--mode", "exact", "--x0", "random:small",
             "--eps", "1e-10", "--trace", t}) == 0);
  const auto rows = read_csv(t);
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0][0] == "iter");
  CHECK(rows[0].size() == 8);
  CHECK(std::stod(rows.back()[3]) <= 1e-10);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][5] == "500");
  CHECK(slurp(t).find("# status=Converged") != std::string::npos);
  CHECK(fs::exists(t + ".manifest.json"));
}

TEST_CASE("solve flag validation and exit codes") {
  const std::string t = path("flags.csv");
  CHECK(run({"solve", "--instance", planted_500(), "--eps0", "0.5", "--trace", t}) == 2);
  CHECK(run({"solve", "--instance", planted_500(), "--delta", "0.2", "--trace", t}) == 2);
  CHECK(run({"solve", "--instance", planted_500(), "--mode", "fast", "--trace", t}) == 2);
  CHECK(run({"solve", "--instance", planted_500(), "--x0", "random:abc", "--trace", t}) == 2);
  CHECK(run({"solve", "--instance", path("missing.json"), "--trace", t}) == 2);
  CHECK(run({"solve", "--instance", planted_500(), "--max-iters", "1", "--eps", "1e-300",
             "--trace", t}) == 4);
  CHECK(run({"solve", "--instance", planted_500(), "--x0", "zero", "--trace", t}) == 0);
  CHECK(read_csv(t).size() == 2);
}

TEST_CASE("sketched solve is reproducible") {
  const std::string a = path("sk_a.csv"), b = path("sk_b.csv");
  const std::vector<std::string> common = {"solve", "--instance", planted_500(), "--mode",
                                           "sketched", "--seed", "11", "--eps", "1e-8",
                                           "--sketch-constant", "0.5", "--eps0", "0.09"};
  auto with = [&](const std::string& t) {
    auto v = common;
    v.insert(v.end(), {"--trace", t});
    return v;
  };
  CHECK(run(with(a)) == 0);
  CHECK(run(with(b)) == 0);
  CHECK(without_wall_ms(a) == without_wall_ms(b));
}

TEST_CASE("verify checks") {
  const std::string r = path("report.csv");
  CHECK(run({"verify", "--instance", planted_500(), "--check", "grad", "--report", r}) == 0);
  auto rows = read_csv(r);
  CHECK(rows[0] == std::vector<std::string>{"check", "metric", "value", "threshold", "verdict"});
  CHECK(rows[1][0] == "grad");
  CHECK(rows[1][4] == "pass");

  CHECK(run({"verify", "--instance", planted_500(), "--check", "rate", "--report", r}) == 0);
  rows = read_csv(r);
  CHECK(rows[1][1] == "max_rate");
  CHECK(std::stod(rows[1][2]) <= 0.4);

  const std::string clamped = path("clamped.json");
  CHECK(run({"gen", "--n", "60", "--d", "3", "--seed", "5", "--clamp-c", "--out", clamped}) == 0);
  CHECK(run({"verify", "--instance", clamped, "--check", "bounds", "--report", r}) == 0);
  rows = read_csv(r);
  CHECK(rows[1][1] == "normB1");
  CHECK(std::stod(rows[1][2]) <= 4100.0);

  CHECK(run({"verify", "--instance", planted_500(), "--check", "jac,hess,sigma,sketch",
             "--report", r}) == 0);
  CHECK(run({"verify", "--instance", planted_500(), "--check", "bogus", "--report", r}) == 2);
}

TEST_CASE("bench sweeps") {
  const std::string o = path("bench.csv");
  CHECK(run({"bench", "--sweep", "n", "--values", "1000,4000", "--repeats", "0", "--out", o}) == 2);
  CHECK(run({"bench", "--sweep", "k", "--values", "1", "--out", o}) == 2);
  CHECK(run({"bench", "--sweep", "n", "--values", "1000,4000,16000", "--repeats", "1", "--out",
             o}) == 0);
  const auto rows = read_csv(o);
  REQUIRE(rows.size() == 7);
  std::vector<double> sketched;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double n = std::stod(rows[i][3]);
    const double per_iter = std::stod(rows[i][9]);
    if (rows[i][2] == "exact") {
      CHECK(per_iter == n);
    } else {
      CHECK(per_iter < n);
      CHECK(per_iter <= std::stod(rows[i][11]));
      sketched.push_back(per_iter);
    }
  }
  REQUIRE(sketched.size() == 3);
  // n grows 16x; the per-iteration row count must grow far less.
  CHECK(sketched[2] < 8.0 * sketched[0]);
  CHECK(fs::exists(o + ".manifest.json"));
}
