#include "levinv/calculus.hpp"

#include <string>

#include "levinv/errors.hpp"
#include "levinv/numkit/kernels.hpp"
#include "levinv/numkit/linalg.hpp"

namespace levinv {
namespace {

void check_column(const LeverageState& state, std::size_t j) {
  if (j >= state.d()) {
    throw IndexOutOfRange("column " + std::to_string(j) + " out of range for d = " +
                          std::to_string(state.d()));
  }
}

Vector squares(std::span<const double> w) {
  Vector out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] * w[i];
  return out;
}

}  // namespace

KernelOperator::KernelOperator(const LeverageState& state) : state_(state) {
  const std::size_t n = state.n();
  const std::size_t d = state.d();
  // C = Q^T diag(p) Q
  const DenseMatrix c = weighted_gram(state.q, state.p);
  zt_ = DenseMatrix(d * d, n);
  yt_ = DenseMatrix(d * d, n);
  Vector cq(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto qi = state.q.row(i);
    for (std::size_t a = 0; a < d; ++a) cq[a] = kernels::dot(c.row(a), qi);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t e = 0; e < d; ++e) {
        zt_(a * d + e, i) = qi[a] * qi[e];
        yt_(a * d + e, i) = qi[a] * cq[e];
      }
    }
  }
  kp_ = k_apply(state.p);

  const DenseMatrix axt = state.ax.transpose();
  DenseMatrix phi_ax_t(d, n);
  for (std::size_t j = 0; j < d; ++j) {
    const Vector col = apply(axt.row(j));
    std::copy(col.begin(), col.end(), phi_ax_t.row(j).begin());
  }
  phi_ax_ = phi_ax_t.transpose();
}

Vector KernelOperator::z_apply(const DenseMatrix& rows_t, std::span<const double> v) const {
  // Z (Z'^T v) where rows_t holds Z'^T; the left factor is always Z.
  Vector coeffs(rows_t.rows());
  for (std::size_t r = 0; r < rows_t.rows(); ++r) coeffs[r] = kernels::dot(rows_t.row(r), v);
  Vector out(state_.n(), 0.0);
  for (std::size_t r = 0; r < zt_.rows(); ++r) {
    if (coeffs[r] != 0.0) kernels::axpy(coeffs[r], zt_.row(r), out);
  }
  return out;
}

Vector KernelOperator::sigma2_apply(std::span<const double> v) const {
  return z_apply(zt_, v);
}

Vector KernelOperator::k_apply(std::span<const double> v) const {
  Vector out = sigma2_apply(v);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= state_.f[i] * v[i];
  return out;
}

Vector KernelOperator::apply(std::span<const double> v) const {
  const std::size_t n = state_.n();
  const Vector& p = state_.p;
  const Vector mixed = z_apply(yt_, v);  // (sigma o sigma P sigma) v
  const Vector pv = hadamard(p, v);
  const Vector s2_pv = sigma2_apply(pv);
  const Vector s2_v = sigma2_apply(v);
  const Vector kkv = k_apply(k_apply(v));
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = -3.0 * kp_[i] * v[i] + 4.0 * mixed[i] - 2.0 * (s2_pv[i] + p[i] * s2_v[i]) +
             2.0 * kkv[i];
  }
  return out;
}

DenseMatrix d_sigma_dxj(const LeverageState& state, std::size_t j) {
  check_column(state, j);
  const std::size_t n = state.n();
  const DenseMatrix sigma = sigma_matrix(state);
  const Vector a = state.ax.column(j);
  // 2 sigma D sigma = 2 (sigma D) sigma; sigma D scales columns.
  const DenseMatrix sigma_d = scale_cols(sigma, a);
  const DenseMatrix sds = multiply(sigma_d, sigma);
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      out(i, k) = 2.0 * sds(i, k) - a[i] * sigma(i, k) - sigma(i, k) * a[k];
    }
  }
  return symmetrized(out);
}

Vector d_f_dxj(const LeverageState& state, std::size_t j) {
  check_column(state, j);
  const KernelOperator op(state);
  Vector out = op.k_apply(state.ax.column(j));
  for (double& v : out) v *= 2.0;
  return out;
}

Vector grad_lb(const LeverageState& state) {
  const KernelOperator op(state);
  Vector g = matvec_t(state.ax, op.kp());
  for (double& v : g) v *= 2.0;
  return g;
}

GradientKernel gradient_kernel(const LeverageState& state) {
  const std::size_t n = state.n();
  const DenseMatrix sigma = sigma_matrix(state);
  const DenseMatrix sigma2 = hadamard(sigma, sigma);
  DenseMatrix k = sigma2;
  for (std::size_t i = 0; i < n; ++i) k(i, i) -= state.f[i];
  const Vector kp = matvec(k, state.p);

  // sigma P sigma = Q (Q^T P Q) Q^T
  const DenseMatrix c = weighted_gram(state.q, state.p);
  const DenseMatrix sps = multiply_nt(multiply(state.q, c), state.q);
  const DenseMatrix mixed = hadamard(sigma, sps);
  const DenseMatrix kk = multiply(k, k);

  DenseMatrix phi(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < n; ++m) {
      phi(i, m) = 4.0 * mixed(i, m) - 2.0 * (sigma2(i, m) * state.p[m] + state.p[i] * sigma2(i, m)) +
                  2.0 * kk(i, m);
    }
    phi(i, i) -= 3.0 * kp[i];
  }
  return {symmetrized(phi)};
}

FirstOrder first_order(const LeverageState& state) {
  const KernelOperator op(state);
  FirstOrder fo;
  fo.g = matvec_t(state.ax, op.kp());
  for (double& v : fo.g) v *= 2.0;
  fo.jacobian = multiply_tn(state.ax, op.phi_ax());
  for (double& v : fo.jacobian.data()) v *= 2.0;
  fo.jacobian = symmetrized(fo.jacobian);
  fo.phi_ax = op.phi_ax();
  return fo;
}

DenseMatrix jacobian_g(const LeverageState& state) {
  return first_order(state).jacobian;
}

Vector residual_q(const ProblemInstance& inst, const LeverageState& state) {
  return subtract(grad_lb(state), inst.c);
}

Vector grad_L(const ProblemInstance& inst, const LeverageState& state) {
  return grad_L(inst, state, first_order(state));
}

Vector grad_L(const ProblemInstance& inst, const LeverageState& state,
              const FirstOrder& fo) {
  const Vector q = subtract(fo.g, inst.c);
  Vector out = matvec_t(fo.jacobian, q);
  const Vector ax = matvec(inst.A, state.x);
  const Vector w2ax = hadamard(squares(inst.w), ax);
  kernels::axpy(1.0, matvec_t(inst.A, w2ax), out);
  return out;
}

double loss_reg(const ProblemInstance& inst, std::span<const double> x) {
  const Vector wax = hadamard(inst.w, matvec(inst.A, x));
  return 0.5 * kernels::dot(wax, wax);
}

double loss_L(const ProblemInstance& inst, const LeverageState& state) {
  const Vector q = residual_q(inst, state);
  return 0.5 * kernels::dot(q, q) + loss_reg(inst, state.x);
}

DenseMatrix reg_hessian(const ProblemInstance& inst) {
  return weighted_gram(inst.A, squares(inst.w));
}

}  // namespace levinv
