#pragma once

// Leverage-score row sampling for diagonal weights.
//
// Rows whose sampling intensity rho_i = C_s tau_i log(n/delta) / eps0^2 reaches
// one are kept with their exact weight. The remaining rows share
// m = ceil(sum rho) draws with replacement, pi_i proportional to rho_i, and a
// drawn row carries D_i * count_i / (m pi_i). The estimate is unbiased and
// nnz never exceeds ceil(C_s d log(n/delta) / eps0^2).

#include <cstddef>
#include <span>
#include <vector>

#include "levinv/numkit/dense_matrix.hpp"
#include "levinv/numkit/rng.hpp"

namespace levinv {

inline constexpr double kDefaultSketchConstant = 40.0;

struct SketchedDiag {
  std::vector<std::size_t> indices;  ///< sorted, 0-based
  Vector values;                     ///< D~_ii for each kept row
  std::size_t n = 0;
  double eps0 = 0.0;
  double delta = 0.0;
  double sketch_constant = kDefaultSketchConstant;
  Vector tau;    ///< leverage scores of diag(D)^{1/2} A
  Vector probs;  ///< min(1, rho_i)
  std::size_t draws = 0;  ///< with-replacement draws over unsaturated rows
  std::size_t saturated = 0;

  std::size_t nnz() const noexcept { return indices.size(); }
  /// Dense length-n view, zeros on dropped rows.
  Vector dense() const;

  friend bool operator==(const SketchedDiag&, const SketchedDiag&) = default;
};

/// ceil(C_s d log(n/delta) / eps0^2).
std::size_t nnz_cap(std::size_t n, std::size_t d, double eps0, double delta,
                    double sketch_constant = kDefaultSketchConstant);

/// eps0 and delta must lie in (0, 1); callers that follow the solver contract
/// narrow this to (0, 0.1) themselves. Throws NonPositiveWeight, RankDeficient,
/// BadRange, DimensionMismatch.
SketchedDiag subsample_diag(const DenseMatrix& a, std::span<const double> d_diag,
                            double eps0, double delta, SeededRng& rng,
                            double sketch_constant = kDefaultSketchConstant);

/// A^T D~ A assembled from the kept rows only.
DenseMatrix sketched_gram(const DenseMatrix& a, const SketchedDiag& sk);

struct SandwichResult {
  bool holds = false;
  double lo = 0.0;
  double hi = 0.0;
};

/// Extreme generalized eigenvalues of (P, Q) through the Cholesky factor of Q.
/// Throws NotPositiveDefinite.
SandwichResult sandwich_range(const DenseMatrix& p, const DenseMatrix& q, double eps0);

/// Compares A^T D~ A against A^T D A.
SandwichResult sandwich_check(const DenseMatrix& a, std::span<const double> d_diag,
                              const SketchedDiag& sk);

}  // namespace levinv
