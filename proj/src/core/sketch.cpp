#include "levinv/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "levinv/errors.hpp"
#include "levinv/leverage.hpp"
#include "levinv/numkit/linalg.hpp"

namespace levinv {
namespace {

void check_params(double eps0, double delta, double sketch_constant) {
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw BadRange("subsample_diag: eps0 must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw BadRange("subsample_diag: delta must lie in (0, 1)");
  if (!(sketch_constant > 0.0) || !std::isfinite(sketch_constant)) {
    throw BadRange("subsample_diag: sketch constant must be positive");
  }
}

// Walker alias table; one uniform per draw keeps the stream position
// independent of the outcome.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights) : prob_(weights.size()), alias_(weights.size()) {
    const std::size_t k = weights.size();
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> scaled(k);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < k; ++i) {
      scaled[i] = weights[i] * static_cast<double>(k) / total;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t l = large.back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::size_t i : large) { prob_[i] = 1.0; alias_[i] = i; }
    for (std::size_t i : small) { prob_[i] = 1.0; alias_[i] = i; }
  }

  std::size_t draw(SeededRng& rng) const {
    const double u = rng.next_uniform() * static_cast<double>(prob_.size());
    const auto slot = std::min(static_cast<std::size_t>(u), prob_.size() - 1);
    return (u - static_cast<double>(slot)) < prob_[slot] ? slot : alias_[slot];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace

Vector SketchedDiag::dense() const {
  Vector out(n, 0.0);
  for (std::size_t k = 0; k < indices.size(); ++k) out[indices[k]] = values[k];
  return out;
}

std::size_t nnz_cap(std::size_t n, std::size_t d, double eps0, double delta,
                    double sketch_constant) {
  check_params(eps0, delta, sketch_constant);
  const double mass = sketch_constant * static_cast<double>(d) *
                      std::log(static_cast<double>(n) / delta) / (eps0 * eps0);
  return static_cast<std::size_t>(std::ceil(mass));
}

SketchedDiag subsample_diag(const DenseMatrix& a, std::span<const double> d_diag,
                            double eps0, double delta, SeededRng& rng,
                            double sketch_constant) {
  check_params(eps0, delta, sketch_constant);
  const std::size_t n = a.rows();
  if (d_diag.size() != n) throw DimensionMismatch("subsample_diag: D length must equal rows of A");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(d_diag[i] > 0.0) || !std::isfinite(d_diag[i])) {
      throw NonPositiveWeight("subsample_diag: D entry " + std::to_string(i) + " is not positive");
    }
  }

  Vector root(n);
  for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(d_diag[i]);

  SketchedDiag sk;
  sk.n = n;
  sk.eps0 = eps0;
  sk.delta = delta;
  sk.sketch_constant = sketch_constant;
  sk.tau = leverage_scores_plain(scale_rows(root, a));
  sk.probs.resize(n);

  const double factor = sketch_constant * std::log(static_cast<double>(n) / delta) / (eps0 * eps0);
  Vector rho(n);
  std::vector<std::size_t> open_rows;
  Vector open_rho;
  double open_mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rho[i] = factor * sk.tau[i];
    sk.probs[i] = std::min(1.0, rho[i]);
    if (rho[i] >= 1.0) {
      ++sk.saturated;
    } else if (rho[i] > 0.0) {
      open_rows.push_back(i);
      open_rho.push_back(rho[i]);
      open_mass += rho[i];
    }
  }

  std::vector<std::size_t> counts(n, 0);
  if (!open_rows.empty()) {
    sk.draws = static_cast<std::size_t>(std::ceil(open_mass));
    const AliasTable table(open_rho);
    for (std::size_t t = 0; t < sk.draws; ++t) ++counts[open_rows[table.draw(rng)]];
  }

  const double m = static_cast<double>(sk.draws);
  for (std::size_t i = 0; i < n; ++i) {
    if (rho[i] >= 1.0) {
      sk.indices.push_back(i);
      sk.values.push_back(d_diag[i]);
    } else if (counts[i] > 0) {
      const double pi = rho[i] / open_mass;
      sk.indices.push_back(i);
      sk.values.push_back(d_diag[i] * static_cast<double>(counts[i]) / (m * pi));
    }
  }
  return sk;
}

DenseMatrix sketched_gram(const DenseMatrix& a, const SketchedDiag& sk) {
  if (sk.n != a.rows()) throw DimensionMismatch("sketched_gram: sketch built for another A");
  const std::size_t d = a.cols();
  DenseMatrix out(d, d);
  for (std::size_t k = 0; k < sk.indices.size(); ++k) {
    const auto row = a.row(sk.indices[k]);
    const double v = sk.values[k];
    for (std::size_t i = 0; i < d; ++i) {
      const double vi = v * row[i];
      for (std::size_t j = i; j < d; ++j) out(i, j) += vi * row[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) out(i, j) = out(j, i);
  }
  return out;
}

SandwichResult sandwich_range(const DenseMatrix& p, const DenseMatrix& q, double eps0) {
  if (p.rows() != q.rows() || p.cols() != q.cols() || p.rows() != p.cols()) {
    throw DimensionMismatch("sandwich_range: P and Q must be square and equal-sized");
  }
  const std::size_t d = q.rows();
  const DenseMatrix l = cholesky(q);
  // M = L^{-1} P L^{-T}, one column solve at a time.
  DenseMatrix half(d, d);  // L^{-1} P
  for (std::size_t j = 0; j < d; ++j) {
    const Vector col = forward_substitute(l, p.column(j));
    for (std::size_t i = 0; i < d; ++i) half(i, j) = col[i];
  }
  DenseMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    const Vector row = forward_substitute(l, half.row(i));
    for (std::size_t j = 0; j < d; ++j) m(i, j) = row[j];
  }
  const Vector ev = symmetric_eigenvalues(symmetrized(m));
  SandwichResult out;
  out.lo = ev.front();
  out.hi = ev.back();
  out.holds = out.lo >= 1.0 - eps0 && out.hi <= 1.0 + eps0;
  return out;
}

SandwichResult sandwich_check(const DenseMatrix& a, std::span<const double> d_diag,
                              const SketchedDiag& sk) {
  if (d_diag.size() != a.rows()) throw DimensionMismatch("sandwich_check: D length mismatch");
  const DenseMatrix exact = weighted_gram(a, d_diag);
  return sandwich_range(sketched_gram(a, sk), exact, sk.eps0);
}

}  // namespace levinv
