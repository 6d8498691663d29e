#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "levinv/numkit/linalg.hpp"
#include "levinv/numkit/rng.hpp"
#include "levinv/problem.hpp"

namespace levinv::testing {

struct BatteryCase {
  ProblemInstance inst;
  Vector x;  ///< evaluation point, feasible
};

// Planted A and b, but c drawn independently and w kept small so the
// leverage part of the loss dominates the curvature.
inline BatteryCase battery_case(std::size_t n, std::size_t d, std::uint64_t seed,
                                double kappa = 10.0, double w_value = 0.3) {
  PlantSpec spec;
  spec.n = n;
  spec.d = d;
  spec.seed = seed;
  spec.kappa = kappa;
  spec.b_floor = 0.2 / std::sqrt(static_cast<double>(n));
  BatteryCase out;
  out.inst = gen_planted(spec).instance;
  out.inst.x_star.clear();
  SeededRng rng = SeededRng(seed).substream("battery");
  Vector c = draw_normal(rng, d);
  const double cn = norm2(c);
  for (double& ci : c) ci *= 0.5 / cn;
  out.inst.c = c;
  out.inst.w.assign(n, w_value);
  // Small random point; residual rows stay well away from zero.
  for (int attempt = 0; attempt < 50; ++attempt) {
    Vector x = draw_normal(rng, d);
    const double xn = norm2(x);
    for (double& xi : x) xi *= 0.4 * spec.b_floor / xn;
    if (validate_at(out.inst, x).min_abs_residual > 0.5 * spec.b_floor) {
      out.x = x;
      return out;
    }
  }
  out.x.assign(d, 0.0);
  return out;
}

// The 20-case battery: n in {10, 50, 200}, d in {2, 5, 10} with n >= 2d.
inline std::vector<BatteryCase> standard_battery() {
  const std::size_t ns[] = {10, 50, 200};
  const std::size_t ds[] = {2, 5, 10};
  const double kappas[] = {1.0, 10.0, 100.0, 1000.0};
  std::vector<BatteryCase> out;
  std::uint64_t seed = 1000;
  while (out.size() < 20) {
    for (std::size_t n : ns) {
      for (std::size_t d : ds) {
        if (n < 2 * d || out.size() >= 20) continue;
        out.push_back(battery_case(n, d, seed, kappas[seed % 4]));
        ++seed;
      }
    }
  }
  return out;
}

inline DenseMatrix matrix(std::size_t rows, std::size_t cols, std::vector<double> v) {
  return DenseMatrix::from_row_major(rows, cols, std::move(v));
}

inline ProblemInstance tiny_instance(DenseMatrix a, Vector b, Vector c, Vector w) {
  ProblemInstance inst;
  inst.n = a.rows();
  inst.d = a.cols();
  inst.A = std::move(a);
  inst.b = std::move(b);
  inst.c = std::move(c);
  inst.w = std::move(w);
  return inst;
}

}  // namespace levinv::testing
