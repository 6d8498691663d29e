#pragma once

#include <cstddef>
#include <span>
#include <utility>

#include "levinv/numkit/dense_matrix.hpp"

namespace levinv {

// ---- vectors ---------------------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);
Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scaled(double alpha, std::span<const double> v);
Vector hadamard(std::span<const double> a, std::span<const double> b);

// ---- products --------------------------------------------------------------

/// A * B
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
/// A^T * B
DenseMatrix multiply_tn(const DenseMatrix& a, const DenseMatrix& b);
/// A * B^T
DenseMatrix multiply_nt(const DenseMatrix& a, const DenseMatrix& b);
/// A^T diag(w) A, exactly symmetric.
DenseMatrix weighted_gram(const DenseMatrix& a, std::span<const double> w);
/// A^T A, exactly symmetric.
DenseMatrix gram(const DenseMatrix& a);
Vector matvec(const DenseMatrix& a, std::span<const double> v);
/// A^T v
Vector matvec_t(const DenseMatrix& a, std::span<const double> v);

/// diag(d) * M
DenseMatrix scale_rows(std::span<const double> d, const DenseMatrix& m);
/// M * diag(d)
DenseMatrix scale_cols(const DenseMatrix& m, std::span<const double> d);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scaled(double alpha, const DenseMatrix& m);
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);
/// (M + M^T) / 2
DenseMatrix symmetrized(const DenseMatrix& m);

/// Largest |entry|.
double max_abs(const DenseMatrix& m);
double frobenius(const DenseMatrix& m);
/// max |M_ij - M_ji|
double asymmetry(const DenseMatrix& m);

// ---- factorizations --------------------------------------------------------

struct ThinQr {
  DenseMatrix q;  ///< n x d, orthonormal columns
  DenseMatrix r;  ///< d x d, upper triangular with non-negative diagonal
};

/// Householder thin QR of an n x d matrix with n >= d. Throws RankDeficient
/// when sigma_min(M) <= 1e-12 * ||M||.
ThinQr qr_thin(const DenseMatrix& m);

/// Relative rank tolerance used by qr_thin.
inline constexpr double kRankTolerance = 1e-12;

/// Lower Cholesky factor of a symmetric positive definite matrix. Throws
/// NotPositiveDefinite on a non-positive pivot.
DenseMatrix cholesky(const DenseMatrix& h);

/// Solve H x = v for symmetric positive definite H (Cholesky plus one round
/// of iterative refinement). Throws NotPositiveDefinite or DimensionMismatch.
Vector solve_spd(const DenseMatrix& h, std::span<const double> v);

/// Solve L y = v (forward) and L^T x = y (backward) for lower-triangular L.
Vector forward_substitute(const DenseMatrix& l, std::span<const double> v);
Vector backward_substitute_t(const DenseMatrix& l, std::span<const double> v);

// ---- spectra ---------------------------------------------------------------

struct SingularExtremes {
  double sigma_max = 0.0;
  double sigma_min = 0.0;
};

/// Largest and smallest singular value (min over min(rows, cols) values).
SingularExtremes extreme_singular_values(const DenseMatrix& m);

/// Spectral norm.
double spectral_norm(const DenseMatrix& m);

/// Eigenvalues of a symmetric matrix, ascending. Uses the lower triangle.
Vector symmetric_eigenvalues(const DenseMatrix& m);

}  // namespace levinv
