#include "levinv/numkit/dense_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "levinv/errors.hpp"

namespace levinv {

DenseMatrix DenseMatrix::from_row_major(std::size_t rows, std::size_t cols,
                                        std::vector<double> entries) {
  if (entries.size() != rows * cols) {
    throw DimensionMismatch("matrix " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " given " +
                            std::to_string(entries.size()) + " entries");
  }
  DenseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.entries_ = std::move(entries);
  if (!m.all_finite()) {
    throw std::invalid_argument("matrix entries must be finite");
  }
  return m;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  DenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Vector DenseMatrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Vector DenseMatrix::diagonal_entries() const {
  const std::size_t k = std::min(rows_, cols_);
  Vector out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = (*this)(i, i);
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace levinv
