#include "levinv/leverage.hpp"

#include <string>

#include "levinv/errors.hpp"
#include "levinv/numkit/kernels.hpp"
#include "levinv/numkit/linalg.hpp"

namespace levinv {
namespace {

Vector squared_row_norms(const DenseMatrix& m) {
  Vector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = kernels::dot(m.row(i), m.row(i));
  return out;
}

}  // namespace

Vector leverage_scores_plain(const DenseMatrix& a) {
  return squared_row_norms(qr_thin(a).q);
}

LeverageState build_state(const ProblemInstance& inst, std::span<const double> x) {
  const FeasibilityReport feas = validate_at(inst, x);
  if (!feas.pass) {
    throw ZeroResidualRow("residual row " + std::to_string(feas.worst_row) + " has |s| = " +
                              format_double(feas.min_abs_residual) + " <= " +
                              format_double(feas.tolerance),
                          feas.worst_row);
  }
  LeverageState st;
  st.x.assign(x.begin(), x.end());
  st.s = subtract(matvec(inst.A, x), inst.b);
  Vector inv_s(st.s.size());
  for (std::size_t i = 0; i < inv_s.size(); ++i) inv_s[i] = 1.0 / st.s[i];
  st.ax = scale_rows(inv_s, inst.A);
  ThinQr qr = qr_thin(st.ax);
  st.q = std::move(qr.q);
  st.r = std::move(qr.r);
  st.f = squared_row_norms(st.q);
  st.p = subtract(st.f, inst.b);
  return st;
}

DenseMatrix sigma_matrix(const LeverageState& state) {
  const std::size_t n = state.n();
  DenseMatrix sigma(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i; k < n; ++k) {
      const double v = kernels::dot(state.q.row(i), state.q.row(k));
      sigma(i, k) = v;
      sigma(k, i) = v;
    }
  }
  return sigma;
}

Vector sigma_apply(const LeverageState& state, std::span<const double> v) {
  return matvec(state.q, matvec_t(state.q, v));
}

double loss_lb(const LeverageState& state, std::span<const double> b) {
  const Vector diff = subtract(state.f, b);
  return 0.5 * kernels::dot(diff, diff);
}

SpectralProfile spectral_profile(const LeverageState& state) {
  // sigma(A_x) = sigma(R) since Q has orthonormal columns.
  const SingularExtremes ext = extreme_singular_values(state.r);
  return {ext.sigma_min, ext.sigma_max, state.x};
}

}  // namespace levinv
