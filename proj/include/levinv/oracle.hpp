#pragma once

// Slow, simple reference computations. Nothing here shares a code path with
// the analytic derivatives or the QR-based leverage route it is used to check.

#include <functional>
#include <span>

#include "levinv/numkit/dense_matrix.hpp"

namespace levinv::oracle {

/// Central differences with per-coordinate step base_step * max(1, |x_j|).
struct FdPlan {
  double base_step = 1e-5;
  bool richardson = false;

  /// Throws BadRange unless base_step is in [1e-8, 1e-3].
  void validate() const;
  double step(double xj) const;
};

using ScalarFn = std::function<double(std::span<const double>)>;
using VectorFn = std::function<Vector(std::span<const double>)>;

/// Throws ProbeInfeasible when fn fails (ZeroResidualRow) or returns a
/// non-finite value at a probe point.
Vector fd_gradient(const ScalarFn& fn, std::span<const double> x, const FdPlan& plan);

/// Column j holds d fn / d x_j.
DenseMatrix fd_jacobian(const VectorFn& fn, std::span<const double> x, const FdPlan& plan);

/// Four-point second differences, symmetrized.
DenseMatrix fd_hessian(const ScalarFn& fn, std::span<const double> x, const FdPlan& plan);

/// A_x (A_x^T A_x)^{-1} A_x^T evaluated literally (Gram matrix + Cholesky
/// inverse). Throws RankDeficient.
DenseMatrix brute_sigma(const DenseMatrix& ax);

struct GeneralizedRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Extreme generalized eigenvalues of (P, Q) through Q^{-1/2} P Q^{-1/2},
/// with Q^{-1/2} from a symmetric eigendecomposition. Throws
/// NotPositiveDefinite when Q is not positive definite.
GeneralizedRange generalized_range(const DenseMatrix& p, const DenseMatrix& q);

/// True iff every generalized eigenvalue of (P, Q) lies in [lo, hi].
bool psd_order_check(const DenseMatrix& p, const DenseMatrix& q, double lo, double hi);

/// ||a - b|| / max(||b||, floor) in the Frobenius/2-norm.
double relative_error(std::span<const double> a, std::span<const double> b,
                      double floor = 1e-300);
double relative_error(const DenseMatrix& a, const DenseMatrix& b, double floor = 1e-300);

}  // namespace levinv::oracle
