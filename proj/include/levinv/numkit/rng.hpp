#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "levinv/numkit/dense_matrix.hpp"

namespace levinv {

/// Seeded 64-bit stream. Uniforms and normals are derived from the raw
/// integer output by fixed formulas, so a seed reproduces the same draws on
/// every platform. Single owner: never share one stream across threads.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double next_uniform();
  /// Standard normal (Box-Muller).
  double next_normal();
  /// Uniform integer on [0, bound).
  std::uint64_t next_below(std::uint64_t bound);

  /// Independent stream derived from this stream's seed and a name.
  /// Does not advance this stream.
  SeededRng substream(std::string_view name) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 finalizer; used to derive substream seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

Vector draw_uniform(SeededRng& rng, std::size_t k);
Vector draw_normal(SeededRng& rng, std::size_t k);
DenseMatrix draw_gaussian(SeededRng& rng, std::size_t rows, std::size_t cols);

}  // namespace levinv
