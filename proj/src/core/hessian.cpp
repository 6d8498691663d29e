#include "levinv/hessian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "levinv/errors.hpp"
#include "levinv/numkit/eigen_bridge.hpp"
#include "levinv/numkit/kernels.hpp"
#include "levinv/numkit/linalg.hpp"

namespace levinv {
namespace {

// J_g(x) q0 at a probe point (J_g is symmetric, so this is also J_g^T q0).
Vector jacobian_times(const ProblemInstance& inst, std::span<const double> x,
                      std::span<const double> q0) {
  const LeverageState st = build_state(inst, x);
  return matvec(jacobian_g(st), q0);
}

Vector central_column(const ProblemInstance& inst, const Vector& x, std::size_t k,
                      double h, std::span<const double> q0) {
  Vector xp = x;
  Vector xm = x;
  xp[k] += h;
  xm[k] -= h;
  Vector out = subtract(jacobian_times(inst, xp, q0), jacobian_times(inst, xm, q0));
  for (double& v : out) v /= 2.0 * h;
  return out;
}

// R^{-T} t R^{-1}
Eigen::MatrixXd lifted_core(const LeverageState& state, const DenseMatrix& t) {
  const Eigen::MatrixXd r = as_eigen(state.r);
  const Eigen::MatrixXd tm = as_eigen(t);
  const auto upper = r.triangularView<Eigen::Upper>();
  // X = t R^{-1}  <=>  R^T X^T = t^T
  const Eigen::MatrixXd x = upper.transpose().solve(tm.transpose()).transpose();
  return upper.transpose().solve(x);
}

// Spectral norm of the symmetric matrix U M U^T.
double lowrank_norm(const Eigen::MatrixXd& u, const Eigen::MatrixXd& mid) {
  const Eigen::MatrixXd gu = u.transpose() * u;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(gu);
  const Eigen::VectorXd lam = eg.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd root = eg.eigenvectors() * lam.asDiagonal() * eg.eigenvectors().transpose();
  const Eigen::MatrixXd core = root * mid * root;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(0.5 * (core + core.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return ec.eigenvalues().cwiseAbs().maxCoeff();
}

double sym_spectral_norm(const DenseMatrix& m) {
  const Vector ev = symmetric_eigenvalues(m);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

}  // namespace

DenseMatrix kernel_B1(const LeverageState& state) {
  const KernelOperator op(state);
  DenseMatrix b1 = multiply_nt(op.phi_ax(), op.phi_ax());
  for (double& v : b1.data()) v *= 4.0;
  return b1;
}

DenseMatrix second_order_T(const ProblemInstance& inst, const LeverageState& state) {
  const std::size_t d = state.d();
  const Vector q0 = residual_q(inst, state);
  DenseMatrix t(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    double h = 1e-4 * std::max(1.0, std::abs(state.x[k]));
    for (int shrink = 0;; ++shrink) {
      try {
        const Vector coarse = central_column(inst, state.x, k, h, q0);
        const Vector fine = central_column(inst, state.x, k, 0.5 * h, q0);
        for (std::size_t j = 0; j < d; ++j) {
          t(j, k) = (4.0 * fine[j] - coarse[j]) / 3.0;
        }
        break;
      } catch (const ZeroResidualRow&) {
        if (shrink == 3) throw;
        h /= 10.0;
      }
    }
  }
  return symmetrized(t);
}

HessianBundle hessian_L(const ProblemInstance& inst, const LeverageState& state,
                        HessianMode mode) {
  return hessian_L(inst, state, mode, first_order(state));
}

HessianBundle hessian_L(const ProblemInstance& inst, const LeverageState& state,
                        HessianMode mode, const FirstOrder& fo) {
  HessianBundle out;
  out.mode = mode;
  out.b1_part = symmetrized(multiply_tn(fo.jacobian, fo.jacobian));
  out.reg_part = reg_hessian(inst);
  out.t_part = mode == HessianMode::full ? second_order_T(inst, state)
                                         : DenseMatrix(state.d(), state.d());
  out.h = symmetrized(add(add(out.b1_part, out.t_part), out.reg_part));
  return out;
}

DenseMatrix inner_G(const LeverageState& state, const DenseMatrix& b) {
  if (b.rows() != state.n() || b.cols() != state.n()) {
    throw DimensionMismatch("inner_G: kernel must be n x n");
  }
  Vector inv_s(state.n());
  for (std::size_t i = 0; i < inv_s.size(); ++i) inv_s[i] = 1.0 / state.s[i];
  return symmetrized(scale_cols(scale_rows(inv_s, b), inv_s));
}

DenseMatrix lift_second_order(const LeverageState& state, const DenseMatrix& t) {
  const DenseMatrix core = from_eigen(lifted_core(state, t));
  return symmetrized(multiply_nt(multiply(state.q, core), state.q));
}

Vector inner_G_diagonal(const LeverageState& state, const FirstOrder& fo,
                        const DenseMatrix* t) {
  const std::size_t n = state.n();
  Vector diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = 4.0 * kernels::dot(fo.phi_ax.row(i), fo.phi_ax.row(i));
  }
  if (t != nullptr) {
    const DenseMatrix core = from_eigen(lifted_core(state, *t));
    const DenseMatrix qc = multiply(state.q, core);
    for (std::size_t i = 0; i < n; ++i) diag[i] += kernels::dot(qc.row(i), state.q.row(i));
  }
  for (std::size_t i = 0; i < n; ++i) diag[i] /= state.s[i] * state.s[i];
  return diag;
}

KernelNorms kernel_norms(const LeverageState& state, const FirstOrder& fo,
                         const DenseMatrix& t) {
  const std::size_t n = state.n();
  const std::size_t d = state.d();
  Eigen::MatrixXd u(n, 2 * d);
  u.leftCols(d) = as_eigen(fo.phi_ax);
  u.rightCols(d) = as_eigen(state.q);
  Eigen::MatrixXd mid = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  mid.topLeftCorner(d, d) = 4.0 * Eigen::MatrixXd::Identity(d, d);
  mid.bottomRightCorner(d, d) = lifted_core(state, t);

  KernelNorms out;
  const SingularExtremes b1 = extreme_singular_values(fo.phi_ax);
  out.norm_b1 = 4.0 * b1.sigma_max * b1.sigma_max;
  out.norm_b = lowrank_norm(u, mid);
  Eigen::VectorXd inv_s(n);
  for (std::size_t i = 0; i < n; ++i) inv_s[static_cast<Eigen::Index>(i)] = 1.0 / state.s[i];
  out.norm_g = lowrank_norm(inv_s.asDiagonal() * u, mid);
  return out;
}

Vector sample_ball(std::span<const double> center, double radius, SeededRng& rng) {
  const std::size_t d = center.size();
  Vector dir = draw_normal(rng, d);
  const double len = norm2(dir);
  const double r = radius * std::pow(rng.next_uniform(), 1.0 / static_cast<double>(d));
  Vector out(center.begin(), center.end());
  if (len > 0.0) kernels::axpy(r / len, dir, out);
  return out;
}

std::vector<PointPair> sample_pairs(const ProblemInstance& inst,
                                    std::span<const double> center, double radius,
                                    std::size_t count, SeededRng& rng) {
  std::vector<PointPair> pairs;
  pairs.reserve(count);
  std::size_t rejected = 0;
  while (pairs.size() < count) {
    PointPair pp{sample_ball(center, radius, rng), sample_ball(center, radius, rng)};
    if (validate_at(inst, pp.x).pass && validate_at(inst, pp.y).pass && pp.x != pp.y) {
      pairs.push_back(std::move(pp));
    } else if (++rejected > 1000 * (count + 1)) {
      throw ProbeInfeasible("sample_pairs: ball of radius " + format_double(radius) +
                            " is mostly infeasible");
    }
  }
  return pairs;
}

BoundLedger bound_ledger(const ProblemInstance& inst, const LeverageState& state,
                         std::span<const PointPair> pairs) {
  std::string violated;
  if (norm2(inst.b) > 1.0 + 1e-12) violated += " ||b||_2 <= 1";
  if (norm2(inst.c) > 1.0 + 1e-12) violated += " ||c||_2 <= 1";
  if (!violated.empty()) throw HypothesisViolated("bound hypotheses failed:" + violated);

  BoundLedger led;
  led.beta = std::numeric_limits<double>::infinity();
  led.pd_floor = std::numeric_limits<double>::infinity();

  auto visit = [&](const LeverageState& st) {
    const SpectralProfile prof = spectral_profile(st);
    led.beta = std::min(led.beta, prof.beta);
    led.rcap = std::max(led.rcap, prof.rcap);
    const FirstOrder fo = first_order(st);
    HessianBundle hb = hessian_L(inst, st, HessianMode::full, fo);
    const KernelNorms kn = kernel_norms(st, fo, hb.t_part);
    led.norm_b1 = std::max(led.norm_b1, kn.norm_b1);
    led.norm_b = std::max(led.norm_b, kn.norm_b);
    led.norm_g = std::max(led.norm_g, kn.norm_g);
    led.pd_floor = std::min(led.pd_floor, symmetric_eigenvalues(hb.h).front());
    return std::move(hb.h);
  };

  visit(state);
  for (const PointPair& pp : pairs) {
    const DenseMatrix hx = visit(build_state(inst, pp.x));
    const DenseMatrix hy = visit(build_state(inst, pp.y));
    const double dist = norm2(subtract(pp.x, pp.y));
    led.lipschitz_ratio_max =
        std::max(led.lipschitz_ratio_max, sym_spectral_norm(subtract(hx, hy)) / dist);
  }

  if (!(led.beta > 0.0)) throw HypothesisViolated("sigma_min(A_x) must be > 0");
  const double sig_a = extreme_singular_values(inst.A).sigma_min;
  const double w2_min =
      std::pow(*std::min_element(inst.w.begin(), inst.w.end(),
                                 [](double a, double b) { return std::abs(a) < std::abs(b); }),
               2);
  led.b_bound = 12000.0 * led.beta * led.rcap;
  led.implied_l =
      (w2_min - 12000.0 * std::pow(led.beta, 3) * led.rcap) * sig_a * sig_a;
  led.lipschitz_bound = 1024000.0 * std::pow(led.beta, -7) * std::pow(led.rcap, 6);

  led.b1_ok = led.norm_b1 <= led.b1_bound;
  led.b_ok = led.norm_b <= led.b_bound;
  led.pd_applicable = led.implied_l > 0.0;
  led.pd_ok = !led.pd_applicable || led.pd_floor >= led.implied_l * (1.0 - 1e-6);
  led.lipschitz_ok = led.lipschitz_ratio_max <= led.lipschitz_bound;
  return led;
}

}  // namespace levinv
