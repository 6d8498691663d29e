#pragma once

// Inner-loop kernels used by every dense product in the library.
//
// Each kernel has a portable scalar reference and, where the host supports
// it, a vectorized variant. The variant is picked once at startup (or by
// LEVINV_KERNELS=scalar|avx2) and every product in the process then goes
// through the same table, so a single run is reproducible bit-for-bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace levinv::kernels {

struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// sum_i w[i] * a[i] * b[i]
  double (*weighted_dot)(const double* w, const double* a, const double* b,
                         std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// out[i] = a[i] * b[i]; out may alias a or b
  void (*hadamard)(const double* a, const double* b, double* out,
                   std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// Null when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_table() noexcept;

/// Table every product uses.
const KernelTable& active() noexcept;

/// Switch the active table: "scalar", "avx2" or "auto". Returns false (and
/// leaves the selection unchanged) when the request cannot be honoured.
bool select(std::string_view name) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double weighted_dot(std::span<const double> w, std::span<const double> a,
                           std::span<const double> b) {
  return active().weighted_dot(w.data(), a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void hadamard(std::span<const double> a, std::span<const double> b,
                     std::span<double> out) {
  active().hadamard(a.data(), b.data(), out.data(), a.size());
}

}  // namespace levinv::kernels
