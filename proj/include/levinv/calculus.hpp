#pragma once

#include <cstddef>
#include <span>

#include "levinv/leverage.hpp"
#include "levinv/numkit/dense_matrix.hpp"
#include "levinv/problem.hpp"

namespace levinv {

/// The n x n symmetric factor with  dg/dx = 2 A_x^T Phi A_x,  where
///
///   Phi = -3 diag(K p) + 4 sigma o (sigma P sigma)
///         - 2 (sigma2 P + P sigma2) + 2 K^2,
///   sigma2 = sigma o sigma,  K = sigma2 - diag(f),  P = diag(p).
struct GradientKernel {
  DenseMatrix phi;
};

/// Matrix-free Phi for one state.
///
/// Uses sigma2 = Z Z^T with Z_i = q_i (x) q_i (row-wise Kronecker of Q) and
/// sigma o (sigma P sigma) = Z Y^T with Y_i = q_i (x) (Q^T P Q) q_i, so one
/// product costs O(n d^2) and nothing n x n is stored.
class KernelOperator {
 public:
  explicit KernelOperator(const LeverageState& state);

  /// sigma2 v
  Vector sigma2_apply(std::span<const double> v) const;
  /// K v
  Vector k_apply(std::span<const double> v) const;
  /// Phi v
  Vector apply(std::span<const double> v) const;
  /// Phi A_x, n x d
  const DenseMatrix& phi_ax() const noexcept { return phi_ax_; }
  /// K p
  const Vector& kp() const noexcept { return kp_; }

 private:
  Vector z_apply(const DenseMatrix& rows_t, std::span<const double> v) const;

  const LeverageState& state_;
  DenseMatrix zt_;  // d^2 x n
  DenseMatrix yt_;  // d^2 x n
  Vector kp_;
  DenseMatrix phi_ax_;
};

/// d sigma / d x_j = 2 sigma D sigma - D sigma - sigma D, D = diag(A_x[:, j]).
/// `j` is 0-based; throws IndexOutOfRange.
DenseMatrix d_sigma_dxj(const LeverageState& state, std::size_t j);

/// d f / d x_j = 2 (sigma2 - diag f) A_x[:, j].
Vector d_f_dxj(const LeverageState& state, std::size_t j);

/// g(x) = d L_b / dx = 2 A_x^T (sigma2 - diag f) p.
Vector grad_lb(const LeverageState& state);

/// Materialized Phi (O(n^3)); symmetrized before return.
GradientKernel gradient_kernel(const LeverageState& state);

/// dg/dx = 2 A_x^T Phi A_x, the Hessian of L_b. Exactly symmetric.
DenseMatrix jacobian_g(const LeverageState& state);

/// g, dg/dx and Phi A_x from a single KernelOperator.
struct FirstOrder {
  Vector g;
  DenseMatrix jacobian;
  DenseMatrix phi_ax;
};
FirstOrder first_order(const LeverageState& state);

/// q(x) = g(x) - c
Vector residual_q(const ProblemInstance& inst, const LeverageState& state);

/// J_g^T (g - c) + A^T diag(w o w) A x
Vector grad_L(const ProblemInstance& inst, const LeverageState& state);
/// Same, reusing an already computed first-order bundle.
Vector grad_L(const ProblemInstance& inst, const LeverageState& state,
              const FirstOrder& fo);

/// 0.5 ||g - c||^2 + 0.5 ||diag(w) A x||^2
double loss_L(const ProblemInstance& inst, const LeverageState& state);

/// 0.5 ||diag(w) A x||^2
double loss_reg(const ProblemInstance& inst, std::span<const double> x);

/// A^T diag(w o w) A
DenseMatrix reg_hessian(const ProblemInstance& inst);

}  // namespace levinv
