#pragma once

#include <span>

#include "levinv/numkit/dense_matrix.hpp"
#include "levinv/problem.hpp"

namespace levinv {

/// Every per-x quantity the derivatives are built from.
///
///   s   = A x - b
///   A_x = diag(s)^{-1} A           (ax)
///   A_x = Q R                      (thin QR, R with non-negative diagonal)
///   sigma = A_x (A_x^T A_x)^{-1} A_x^T = Q Q^T
///   f   = diag(sigma)              (squared row norms of Q)
///   p   = f - b
///
/// sigma itself is n x n and is only formed on request (sigma_matrix).
struct LeverageState {
  Vector x;
  Vector s;
  DenseMatrix ax;
  DenseMatrix q;
  DenseMatrix r;
  Vector f;
  Vector p;

  std::size_t n() const noexcept { return s.size(); }
  std::size_t d() const noexcept { return x.size(); }
};

struct SpectralProfile {
  double beta = 0.0;  ///< sigma_min(A_x)
  double rcap = 0.0;  ///< ||A_x||
  Vector at_x;
};

/// Leverage scores of a full-column-rank matrix (squared row norms of its
/// thin orthonormal factor). Throws RankDeficient.
Vector leverage_scores_plain(const DenseMatrix& a);

/// Throws ZeroResidualRow when some |s_i| is at or below the feasibility
/// tolerance, RankDeficient when A_x loses rank.
LeverageState build_state(const ProblemInstance& inst, std::span<const double> x);

/// Q Q^T, exactly symmetric.
DenseMatrix sigma_matrix(const LeverageState& state);

/// sigma v without forming sigma.
Vector sigma_apply(const LeverageState& state, std::span<const double> v);

/// 0.5 ||f - b||^2
double loss_lb(const LeverageState& state, std::span<const double> b);

SpectralProfile spectral_profile(const LeverageState& state);

}  // namespace levinv
