#include "levinv/numkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "levinv/errors.hpp"
#include "levinv/numkit/eigen_bridge.hpp"
#include "levinv/numkit/kernels.hpp"

namespace levinv {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DimensionMismatch(what);
}

std::string shape(const DenseMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: length mismatch");
  return kernels::dot(a, b);
}

double norm2(std::span<const double> v) {
  // Scaled to stay clear of overflow for the large-weight instances.
  double scale = norm_inf(v);
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double acc = 0.0;
  for (double x : v) {
    const double y = x / scale;
    acc += y * y;
  }
  return scale * std::sqrt(acc);
}

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Vector add(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "add: length mismatch");
  Vector out(a.begin(), a.end());
  kernels::axpy(1.0, b, out);
  return out;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "subtract: length mismatch");
  Vector out(a.begin(), a.end());
  kernels::axpy(-1.0, b, out);
  return out;
}

Vector scaled(double alpha, std::span<const double> v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = alpha * v[i];
  return out;
}

Vector hadamard(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "hadamard: length mismatch");
  Vector out(a.size());
  kernels::hadamard(a, b, out);
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("multiply: " + shape(a) + " * " + shape(b));
  }
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik != 0.0) kernels::axpy(aik, b.row(k), out);
    }
  }
  return c;
}

DenseMatrix multiply_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionMismatch("multiply_tn: " + shape(a) + "^T * " + shape(b));
  }
  const DenseMatrix at = a.transpose();
  const DenseMatrix bt = b.transpose();
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t k = 0; k < b.cols(); ++k) {
      c(j, k) = kernels::dot(at.row(j), bt.row(k));
    }
  }
  return c;
}

DenseMatrix multiply_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) {
    throw DimensionMismatch("multiply_nt: " + shape(a) + " * " + shape(b) + "^T");
  }
  DenseMatrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < b.rows(); ++k) {
      c(i, k) = kernels::dot(a.row(i), b.row(k));
    }
  }
  return c;
}

DenseMatrix weighted_gram(const DenseMatrix& a, std::span<const double> w) {
  require(w.size() == a.rows(), "weighted_gram: weight length mismatch");
  const DenseMatrix at = a.transpose();
  DenseMatrix g(a.cols(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t k = j; k < a.cols(); ++k) {
      const double v = kernels::weighted_dot(w, at.row(j), at.row(k));
      g(j, k) = v;
      g(k, j) = v;
    }
  }
  return g;
}

DenseMatrix gram(const DenseMatrix& a) {
  const DenseMatrix at = a.transpose();
  DenseMatrix g(a.cols(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t k = j; k < a.cols(); ++k) {
      const double v = kernels::dot(at.row(j), at.row(k));
      g(j, k) = v;
      g(k, j) = v;
    }
  }
  return g;
}

Vector matvec(const DenseMatrix& a, std::span<const double> v) {
  require(v.size() == a.cols(), "matvec: length mismatch");
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = kernels::dot(a.row(i), v);
  return out;
}

Vector matvec_t(const DenseMatrix& a, std::span<const double> v) {
  require(v.size() == a.rows(), "matvec_t: length mismatch");
  Vector out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (v[i] != 0.0) kernels::axpy(v[i], a.row(i), out);
  }
  return out;
}

DenseMatrix scale_rows(std::span<const double> d, const DenseMatrix& m) {
  require(d.size() == m.rows(), "scale_rows: length mismatch");
  DenseMatrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (double& x : out.row(i)) x *= d[i];
  }
  return out;
}

DenseMatrix scale_cols(const DenseMatrix& m, std::span<const double> d) {
  require(d.size() == m.cols(), "scale_cols: length mismatch");
  DenseMatrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    kernels::hadamard(out.row(i), d, out.row(i));
  }
  return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("add: " + shape(a) + " + " + shape(b));
  }
  DenseMatrix out = a;
  kernels::axpy(1.0, b.data(), out.data());
  return out;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("subtract: " + shape(a) + " - " + shape(b));
  }
  DenseMatrix out = a;
  kernels::axpy(-1.0, b.data(), out.data());
  return out;
}

DenseMatrix scaled(double alpha, const DenseMatrix& m) {
  DenseMatrix out = m;
  for (double& x : out.data()) x *= alpha;
  return out;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("hadamard: " + shape(a) + " o " + shape(b));
  }
  DenseMatrix out(a.rows(), a.cols());
  kernels::hadamard(a.data(), b.data(), out.data());
  return out;
}

DenseMatrix symmetrized(const DenseMatrix& m) {
  require(m.rows() == m.cols(), "symmetrized: matrix not square");
  DenseMatrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

double max_abs(const DenseMatrix& m) { return norm_inf(m.data()); }

double frobenius(const DenseMatrix& m) { return norm2(m.data()); }

double asymmetry(const DenseMatrix& m) {
  require(m.rows() == m.cols(), "asymmetry: matrix not square");
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
    }
  }
  return worst;
}

namespace {

// Householder factorization of a tall matrix held column-wise (cols[j] is
// column j). On return the upper triangle of R is filled and `reflectors`
// holds unnormalized Householder vectors v_k (length n - k).
struct Householder {
  DenseMatrix r;
  std::vector<Vector> reflectors;
  std::vector<double> v_norm_sq;
};

Householder householder_factor(const DenseMatrix& m) {
  const std::size_t d = m.cols();
  DenseMatrix cols = m.transpose();  // d x n, row j = column j of m
  Householder h{DenseMatrix(d, d), std::vector<Vector>(d), std::vector<double>(d)};

  for (std::size_t k = 0; k < d; ++k) {
    auto col = cols.row(k).subspan(k);
    const double alpha_mag = norm2(col);
    Vector v(col.begin(), col.end());
    double vv = 0.0;
    if (alpha_mag > 0.0) {
      const double alpha = col[0] >= 0.0 ? -alpha_mag : alpha_mag;
      v[0] -= alpha;
      vv = kernels::dot(v, v);
    }
    if (vv > 0.0) {
      for (std::size_t j = k; j < d; ++j) {
        auto target = cols.row(j).subspan(k);
        const double coef = -2.0 * kernels::dot(v, target) / vv;
        kernels::axpy(coef, v, target);
      }
    }
    h.reflectors[k] = std::move(v);
    h.v_norm_sq[k] = vv;
    for (std::size_t j = k; j < d; ++j) h.r(k, j) = cols(j, k);
  }
  return h;
}

}  // namespace

ThinQr qr_thin(const DenseMatrix& m) {
  const std::size_t n = m.rows();
  const std::size_t d = m.cols();
  if (n < d || d == 0) {
    throw DimensionMismatch("qr_thin: need rows >= cols >= 1, got " + shape(m));
  }
  Householder h = householder_factor(m);

  const SingularExtremes ext = extreme_singular_values(h.r);
  if (!(ext.sigma_min > kRankTolerance * ext.sigma_max)) {
    throw RankDeficient("qr_thin: sigma_min " + std::to_string(ext.sigma_min) +
                        " <= 1e-12 * ||M|| (" + std::to_string(ext.sigma_max) +
                        ")");
  }

  // Q = H_0 H_1 ... H_{d-1} [I_d; 0], accumulated column-wise.
  DenseMatrix qcols(d, n);
  for (std::size_t j = 0; j < d; ++j) qcols(j, j) = 1.0;
  for (std::size_t kk = d; kk-- > 0;) {
    const Vector& v = h.reflectors[kk];
    const double vv = h.v_norm_sq[kk];
    if (vv == 0.0) continue;
    for (std::size_t j = 0; j < d; ++j) {
      auto target = qcols.row(j).subspan(kk);
      const double coef = -2.0 * kernels::dot(v, target) / vv;
      kernels::axpy(coef, v, target);
    }
  }

  ThinQr out{qcols.transpose(), std::move(h.r)};
  for (std::size_t k = 0; k < d; ++k) {
    if (out.r(k, k) < 0.0) {
      for (std::size_t j = k; j < d; ++j) out.r(k, j) = -out.r(k, j);
      for (std::size_t i = 0; i < n; ++i) out.q(i, k) = -out.q(i, k);
    }
  }
  return out;
}

DenseMatrix cholesky(const DenseMatrix& h) {
  if (h.rows() != h.cols()) {
    throw DimensionMismatch("cholesky: matrix not square " + shape(h));
  }
  const std::size_t d = h.rows();
  DenseMatrix l(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double partial =
          kernels::dot(l.row(i).first(j), l.row(j).first(j));
      const double v = h(i, j) - partial;
      if (i == j) {
        if (!(v > 0.0) || !std::isfinite(v)) {
          throw NotPositiveDefinite("cholesky: non-positive pivot " +
                                    std::to_string(v) + " at " +
                                    std::to_string(i));
        }
        l(i, i) = std::sqrt(v);
      } else {
        l(i, j) = v / l(j, j);
      }
    }
  }
  return l;
}

Vector forward_substitute(const DenseMatrix& l, std::span<const double> v) {
  require(l.rows() == v.size(), "forward_substitute: length mismatch");
  Vector y(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double partial =
        kernels::dot(l.row(i).first(i), std::span<const double>(y).first(i));
    y[i] = (v[i] - partial) / l(i, i);
  }
  return y;
}

Vector backward_substitute_t(const DenseMatrix& l, std::span<const double> v) {
  require(l.rows() == v.size(), "backward_substitute_t: length mismatch");
  const std::size_t d = v.size();
  Vector x(v.begin(), v.end());
  for (std::size_t i = d; i-- > 0;) {
    x[i] /= l(i, i);
    // Column i of L^T below the diagonal is row i of L left of the diagonal.
    for (std::size_t k = 0; k < i; ++k) x[k] -= l(i, k) * x[i];
  }
  return x;
}

Vector solve_spd(const DenseMatrix& h, std::span<const double> v) {
  if (h.rows() != h.cols() || h.rows() != v.size()) {
    throw DimensionMismatch("solve_spd: " + shape(h) + " with rhs of length " +
                            std::to_string(v.size()));
  }
  const double scale = max_abs(h);
  if (asymmetry(h) > 1e-10 * scale) {
    throw NotPositiveDefinite("solve_spd: matrix not symmetric");
  }
  const DenseMatrix l = cholesky(h);
  Vector x = backward_substitute_t(l, forward_substitute(l, v));
  // One refinement step tightens the residual on moderately conditioned H.
  const Vector residual = subtract(v, matvec(h, x));
  const Vector correction =
      backward_substitute_t(l, forward_substitute(l, residual));
  kernels::axpy(1.0, correction, x);
  return x;
}

SingularExtremes extreme_singular_values(const DenseMatrix& m) {
  if (m.empty()) return {};
  if (m.rows() < m.cols()) return extreme_singular_values(m.transpose());
  if (!m.all_finite()) {
    throw std::invalid_argument("extreme_singular_values: non-finite entries");
  }
  // R from a Householder pass carries the singular values of M; the small
  // d x d SVD is done by one-sided Jacobi for high relative accuracy.
  const DenseMatrix r =
      m.rows() == m.cols() ? m : householder_factor(m).r;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(as_eigen(r)));
  const auto& s = svd.singularValues();
  return {s.maxCoeff(), s.minCoeff()};
}

double spectral_norm(const DenseMatrix& m) {
  return extreme_singular_values(m).sigma_max;
}

Vector symmetric_eigenvalues(const DenseMatrix& m) {
  require(m.rows() == m.cols(), "symmetric_eigenvalues: matrix not square");
  if (m.empty()) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      Eigen::MatrixXd(as_eigen(m)), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NotPositiveDefinite("symmetric_eigenvalues: eigensolver failed");
  }
  const auto& ev = es.eigenvalues();
  return Vector(ev.data(), ev.data() + ev.size());
}

}  // namespace levinv
