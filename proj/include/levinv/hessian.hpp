#pragma once

#include <span>
#include <string>
#include <vector>

#include "levinv/calculus.hpp"
#include "levinv/leverage.hpp"
#include "levinv/numkit/dense_matrix.hpp"
#include "levinv/numkit/rng.hpp"
#include "levinv/problem.hpp"

namespace levinv {

enum class HessianMode { full, gauss_newton };

/// Hessian of L split into its three sources:
///   h = b1_part + t_part + reg_part   (full)
///   h = b1_part + reg_part            (gauss_newton, t_part = 0)
struct HessianBundle {
  DenseMatrix h;
  DenseMatrix b1_part;   ///< J_g^T J_g
  DenseMatrix t_part;    ///< sum_k q_k  d^2 g_k / dx^2
  DenseMatrix reg_part;  ///< A^T W^2 A
  HessianMode mode = HessianMode::full;
};

/// B1 = 4 Phi A_x A_x^T Phi (n x n), so that A_x^T B1 A_x = J_g^T J_g.
DenseMatrix kernel_B1(const LeverageState& state);

/// Second-order contraction T_jk = d/dx_k (J_g(x)^T q0)_j with q0 = g(x) - c
/// held fixed, by central differences of the analytic Jacobian (step
/// 1e-4 max(1, |x_k|), one Richardson refinement), then symmetrized.
/// A probe that leaves the feasible region shrinks the step tenfold up to
/// three times before ZeroResidualRow is rethrown.
DenseMatrix second_order_T(const ProblemInstance& inst, const LeverageState& state);

HessianBundle hessian_L(const ProblemInstance& inst, const LeverageState& state,
                        HessianMode mode);
HessianBundle hessian_L(const ProblemInstance& inst, const LeverageState& state,
                        HessianMode mode, const FirstOrder& fo);

/// diag(s)^{-1} B diag(s)^{-1}
DenseMatrix inner_G(const LeverageState& state, const DenseMatrix& b);

/// Minimum-norm n x n kernel B2 with A_x^T B2 A_x = t:
///   B2 = Q R^{-T} t R^{-1} Q^T.
DenseMatrix lift_second_order(const LeverageState& state, const DenseMatrix& t);

/// diag(G) for B = B1 (+ lift of t when given), without forming n x n data.
Vector inner_G_diagonal(const LeverageState& state, const FirstOrder& fo,
                        const DenseMatrix* t);

struct KernelNorms {
  double norm_b1 = 0.0;
  double norm_b = 0.0;
  double norm_g = 0.0;
};

/// Spectral norms of B1, B = B1 + lift(t) and G = S^{-1} B S^{-1}, computed
/// through their rank-2d factorizations.
KernelNorms kernel_norms(const LeverageState& state, const FirstOrder& fo,
                         const DenseMatrix& t);

struct PointPair {
  Vector x;
  Vector y;
};

/// `count` feasible pairs drawn uniformly from the ball of `radius` around
/// `center`. Infeasible draws are redrawn.
std::vector<PointPair> sample_pairs(const ProblemInstance& inst,
                                    std::span<const double> center, double radius,
                                    std::size_t count, SeededRng& rng);

/// Uniform point in the ball of `radius` around `center`.
Vector sample_ball(std::span<const double> center, double radius, SeededRng& rng);

/// Measured norms against the analytic bounds
///   ||B1|| <= 4100,  ||B|| <= 12000 beta R,
///   H >= l I  where  l = (min_i w_i^2 - 12000 beta^3 R) sigma_min(A)^2,
///   ||H(x) - H(y)|| <= 1024000 beta^-7 R^6 ||x - y||,
/// with beta the smallest sigma_min(A_x) and R the largest ||A_x|| seen over
/// the state point and every pair endpoint.
struct BoundLedger {
  double beta = 0.0;
  double rcap = 0.0;
  double norm_b1 = 0.0;
  double norm_b = 0.0;
  double norm_g = 0.0;
  double pd_floor = 0.0;
  double lipschitz_ratio_max = 0.0;

  double b1_bound = 4100.0;
  double b_bound = 0.0;
  double implied_l = 0.0;
  double lipschitz_bound = 0.0;

  bool b1_ok = false;
  bool b_ok = false;
  bool pd_applicable = false;  ///< implied_l > 0
  bool pd_ok = false;
  bool lipschitz_ok = false;

  bool all_ok() const noexcept {
    return b1_ok && b_ok && (!pd_applicable || pd_ok) && lipschitz_ok;
  }
};

/// Throws HypothesisViolated when ||b||_2 > 1 or ||c||_2 > 1.
BoundLedger bound_ledger(const ProblemInstance& inst, const LeverageState& state,
                         std::span<const PointPair> pairs);

}  // namespace levinv
