#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "levinv/numkit/dense_matrix.hpp"

namespace levinv {

/// The data (A, b, c, w) of
///   L(x) = 0.5 ||g(x) - c||^2 + 0.5 ||diag(w) A x||^2,
/// where g is the gradient of the leverage-score matching loss.
struct ProblemInstance {
  std::size_t n = 0;
  std::size_t d = 0;
  DenseMatrix A;  ///< n x d, full column rank
  Vector b;       ///< n
  Vector c;       ///< d
  Vector w;       ///< n, entrywise > 0
  Vector x_star;  ///< known minimizer (d entries) or empty when unknown

  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

/// Checks every instance invariant (shapes, n >= d >= 1, finite entries,
/// w > 0, full column rank). Throws DimensionMismatch, NonPositiveWeight,
/// RankDeficient or std::invalid_argument.
void validate_instance(const ProblemInstance& inst);

struct FeasibilityReport {
  double min_abs_residual = 0.0;  ///< min_i |(Ax - b)_i|
  std::size_t worst_row = 0;      ///< 0-based row attaining the minimum
  double tolerance = 0.0;         ///< 1e-10 (1 + ||b||_inf + ||A||_inf ||x||_inf)
  bool pass = false;              ///< min_abs_residual > tolerance
};

/// Whether every residual s_i = (Ax - b)_i is safely non-zero at x.
FeasibilityReport validate_at(const ProblemInstance& inst,
                              std::span<const double> x);

/// Row-sum infinity norm.
double matrix_inf_norm(const DenseMatrix& a);

struct PlantSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  double kappa = 10.0;     ///< target sigma_max(A) / sigma_min(A), >= 1
  double b_floor = 0.1;    ///< minimum |b_i|, > 0
  double pd_margin = 0.1;  ///< l in the weight rule, > 0
  bool clamp_c = false;    ///< rescale c to ||c||_2 <= 1 (loses x* = 0)
};

struct PlantedInstance {
  ProblemInstance instance;
  Vector x_star;  ///< all zeros
  double beta = 0.0;       ///< sigma_min(A_0) measured at x = 0
  double rcap = 0.0;       ///< ||A_0|| measured at x = 0
  double sigma_min_a = 0.0;
};

/// Synthetic instance whose loss is stationary at x* = 0.
///
/// A = U diag(s) V^T with s geometric from 1 down to 1/kappa, b has random
/// signs and |b_i| >= b_floor, every w_i^2 = 12000 beta^3 R + l / sigma_min(A)^2
/// with beta and R measured on A_0 = diag(-b)^{-1} A, and c = g(0).
/// Throws GenerationFailed when the spec cannot be met, BadRange on an
/// invalid spec.
PlantedInstance gen_planted(const PlantSpec& spec);

/// Instance file: one JSON object with n, d, A (row-major), b, c, w and
/// format_version = 1. Numbers are written as shortest round-trip decimals.
std::string instance_to_json(const ProblemInstance& inst);
/// Throws ParseError naming the line or field that is wrong.
ProblemInstance instance_from_json(std::string_view text);

void save_instance(const ProblemInstance& inst, const std::filesystem::path& path);
ProblemInstance load_instance(const std::filesystem::path& path);

/// Shortest decimal that parses back to exactly `v`.
std::string format_double(double v);

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace levinv
