#pragma once

// Command-line front end. Every command writes its artifact plus a
// "<artifact>.manifest.json" describing how to reproduce it.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace levinv::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kGeneration = 3,
  kNonConvergence = 4,
  kNumeric = 5,
};

struct GenOptions {
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  double kappa = 10.0;
  double b_floor = -1.0;  ///< negative: 0.2 / sqrt(n)
  double pd_margin = 0.1;
  bool clamp_c = false;
  std::filesystem::path out;
};

struct SolveOptions {
  std::filesystem::path instance;
  std::string mode = "exact";
  std::string hessian;  ///< empty: full for exact, gauss-newton for sketched
  double eps = 1e-10;
  double eps0 = 0.01;
  double delta = 0.05;
  std::size_t max_iters = 100;
  std::uint64_t seed = 0;
  std::string x0 = "random:small";
  double sketch_constant = 40.0;
  std::filesystem::path trace;
};

struct VerifyOptions {
  std::filesystem::path instance;
  std::vector<std::string> checks;  ///< grad jac hess sigma sketch bounds rate, or all
  std::uint64_t seed = 0;
  std::string x0 = "random:small";
  double eps0 = 0.01;
  std::filesystem::path report;
};

struct BenchOptions {
  std::string sweep;  ///< n, d or eps0
  std::vector<double> values;
  std::size_t repeats = 3;
  std::string mode = "both";
  std::size_t n = 1000;
  std::size_t d = 5;
  double eps0 = 0.09;
  double eps = 1e-8;
  double sketch_constant = 0.5;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

int cmd_gen(const GenOptions& opt, std::ostream& log);
int cmd_solve(const SolveOptions& opt, std::ostream& log);
int cmd_verify(const VerifyOptions& opt, std::ostream& log);
int cmd_bench(const BenchOptions& opt, std::ostream& log);

/// Parses argv and runs one subcommand. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace levinv::cli
