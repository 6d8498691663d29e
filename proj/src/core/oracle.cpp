#include "levinv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "levinv/errors.hpp"
#include "levinv/numkit/eigen_bridge.hpp"

namespace levinv::oracle {
namespace {

double probe(const ScalarFn& fn, std::span<const double> x) {
  double v = 0.0;
  try {
    v = fn(x);
  } catch (const ZeroResidualRow& e) {
    throw ProbeInfeasible(std::string("probe left the feasible region: ") + e.what());
  }
  if (!std::isfinite(v)) throw ProbeInfeasible("probe returned a non-finite value");
  return v;
}

Vector probe(const VectorFn& fn, std::span<const double> x) {
  Vector v;
  try {
    v = fn(x);
  } catch (const ZeroResidualRow& e) {
    throw ProbeInfeasible(std::string("probe left the feasible region: ") + e.what());
  }
  for (double e : v) {
    if (!std::isfinite(e)) throw ProbeInfeasible("probe returned a non-finite value");
  }
  return v;
}

Vector gradient_at_scale(const ScalarFn& fn, std::span<const double> x, const FdPlan& plan,
                         double scale) {
  Vector xp(x.begin(), x.end());
  Vector grad(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double h = scale * plan.step(x[j]);
    const double orig = xp[j];
    xp[j] = orig + h;
    const double fp = probe(fn, xp);
    xp[j] = orig - h;
    const double fm = probe(fn, xp);
    xp[j] = orig;
    grad[j] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

DenseMatrix jacobian_at_scale(const VectorFn& fn, std::span<const double> x,
                              const FdPlan& plan, double scale) {
  Vector xp(x.begin(), x.end());
  DenseMatrix jac;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double h = scale * plan.step(x[j]);
    const double orig = xp[j];
    xp[j] = orig + h;
    const Vector fp = probe(fn, xp);
    xp[j] = orig - h;
    const Vector fm = probe(fn, xp);
    xp[j] = orig;
    if (j == 0) jac = DenseMatrix(fp.size(), x.size());
    for (std::size_t i = 0; i < fp.size(); ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
  }
  return jac;
}

DenseMatrix hessian_at_scale(const ScalarFn& fn, std::span<const double> x,
                             const FdPlan& plan, double scale) {
  const std::size_t d = x.size();
  Vector xp(x.begin(), x.end());
  DenseMatrix hess(d, d);
  const double f0 = probe(fn, xp);
  Vector h(d);
  for (std::size_t j = 0; j < d; ++j) h[j] = scale * plan.step(x[j]);

  auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
    Vector y(x.begin(), x.end());
    y[i] += di;
    y[j] += dj;
    return probe(fn, y);
  };
  for (std::size_t i = 0; i < d; ++i) {
    const double fp = at(i, h[i], i, 0.0);
    const double fm = at(i, -h[i], i, 0.0);
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    for (std::size_t j = i + 1; j < d; ++j) {
      const double fpp = at(i, h[i], j, h[j]);
      const double fpm = at(i, h[i], j, -h[j]);
      const double fmp = at(i, -h[i], j, h[j]);
      const double fmm = at(i, -h[i], j, -h[j]);
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

}  // namespace

void FdPlan::validate() const {
  if (!(base_step >= 1e-8 && base_step <= 1e-3)) {
    throw BadRange("fd base_step must lie in [1e-8, 1e-3]");
  }
}

double FdPlan::step(double xj) const { return base_step * std::max(1.0, std::abs(xj)); }

Vector fd_gradient(const ScalarFn& fn, std::span<const double> x, const FdPlan& plan) {
  plan.validate();
  Vector coarse = gradient_at_scale(fn, x, plan, 1.0);
  if (!plan.richardson) return coarse;
  const Vector fine = gradient_at_scale(fn, x, plan, 0.5);
  for (std::size_t j = 0; j < coarse.size(); ++j) {
    coarse[j] = (4.0 * fine[j] - coarse[j]) / 3.0;
  }
  return coarse;
}

DenseMatrix fd_jacobian(const VectorFn& fn, std::span<const double> x, const FdPlan& plan) {
  plan.validate();
  DenseMatrix coarse = jacobian_at_scale(fn, x, plan, 1.0);
  if (!plan.richardson) return coarse;
  const DenseMatrix fine = jacobian_at_scale(fn, x, plan, 0.5);
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    coarse.data()[k] = (4.0 * fine.data()[k] - coarse.data()[k]) / 3.0;
  }
  return coarse;
}

DenseMatrix fd_hessian(const ScalarFn& fn, std::span<const double> x, const FdPlan& plan) {
  plan.validate();
  DenseMatrix coarse = hessian_at_scale(fn, x, plan, 1.0);
  if (!plan.richardson) return coarse;
  const DenseMatrix fine = hessian_at_scale(fn, x, plan, 0.5);
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    coarse.data()[k] = (4.0 * fine.data()[k] - coarse.data()[k]) / 3.0;
  }
  return coarse;
}

DenseMatrix brute_sigma(const DenseMatrix& ax) {
  const Eigen::MatrixXd m = as_eigen(ax);
  const Eigen::MatrixXd gram = m.transpose() * m;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw RankDeficient("brute_sigma: Gram matrix is not positive definite");
  }
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
  const Eigen::MatrixXd sigma = m * inv * m.transpose();
  return from_eigen(0.5 * (sigma + sigma.transpose()));
}

GeneralizedRange generalized_range(const DenseMatrix& p, const DenseMatrix& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols() || p.rows() != p.cols()) {
    throw DimensionMismatch("generalized_range: P and Q must be square and equal-sized");
  }
  const Eigen::MatrixXd qm = as_eigen(q);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(0.5 * (qm + qm.transpose()));
  if (eq.info() != Eigen::Success || !(eq.eigenvalues().minCoeff() > 0.0)) {
    throw NotPositiveDefinite("generalized_range: Q is not positive definite");
  }
  const Eigen::VectorXd inv_root = eq.eigenvalues().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd q_inv_half =
      eq.eigenvectors() * inv_root.asDiagonal() * eq.eigenvectors().transpose();
  const Eigen::MatrixXd pm = as_eigen(p);
  const Eigen::MatrixXd core = q_inv_half * pm * q_inv_half;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(0.5 * (core + core.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return {ec.eigenvalues().minCoeff(), ec.eigenvalues().maxCoeff()};
}

bool psd_order_check(const DenseMatrix& p, const DenseMatrix& q, double lo, double hi) {
  const GeneralizedRange r = generalized_range(p, q);
  return r.lo >= lo && r.hi <= hi;
}

double relative_error(std::span<const double> a, std::span<const double> b, double floor) {
  if (a.size() != b.size()) throw DimensionMismatch("relative_error: size mismatch");
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    ref += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(ref), floor);
}

double relative_error(const DenseMatrix& a, const DenseMatrix& b, double floor) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("relative_error: shape mismatch");
  }
  return relative_error(a.data(), b.data(), floor);
}

}  // namespace levinv::oracle
