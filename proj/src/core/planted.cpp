#include <cmath>
#include <string>

#include "levinv/calculus.hpp"
#include "levinv/errors.hpp"
#include "levinv/leverage.hpp"
#include "levinv/numkit/linalg.hpp"
#include "levinv/numkit/rng.hpp"
#include "levinv/problem.hpp"

namespace levinv {
namespace {

void check_spec(const PlantSpec& spec) {
  if (spec.d < 1 || spec.n < spec.d) {
    throw BadRange("plant spec needs n >= d >= 1, got n=" + std::to_string(spec.n) +
                   " d=" + std::to_string(spec.d));
  }
  if (!(spec.kappa >= 1.0) || !std::isfinite(spec.kappa)) {
    throw BadRange("plant spec needs kappa >= 1");
  }
  if (!(spec.b_floor > 0.0)) throw BadRange("plant spec needs b_floor > 0");
  if (!(spec.pd_margin > 0.0)) throw BadRange("plant spec needs pd_margin > 0");
}

DenseMatrix conditioned_matrix(const PlantSpec& spec, SeededRng& rng) {
  const DenseMatrix u = qr_thin(draw_gaussian(rng, spec.n, spec.d)).q;
  const DenseMatrix v = qr_thin(draw_gaussian(rng, spec.d, spec.d)).q;
  Vector sv(spec.d, 1.0);
  for (std::size_t k = 1; k < spec.d; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(spec.d - 1);
    sv[k] = std::pow(spec.kappa, -t);
  }
  return multiply_nt(scale_cols(u, sv), v);
}

Vector draw_b(const PlantSpec& spec, SeededRng& rng) {
  const double unit_cap = 1.0 / std::sqrt(static_cast<double>(spec.n));
  const double hi = spec.b_floor < unit_cap ? unit_cap : 1.0;
  Vector b(spec.n);
  for (double& bi : b) {
    const double mag = spec.b_floor + (hi - spec.b_floor) * rng.next_uniform();
    bi = rng.next_uniform() < 0.5 ? -mag : mag;
  }
  return b;
}

}  // namespace

PlantedInstance gen_planted(const PlantSpec& spec) {
  check_spec(spec);
  if (spec.b_floor >= 1.0) {
    throw GenerationFailed("b_floor " + format_double(spec.b_floor) +
                           " is unreachable (magnitudes are drawn below 1)");
  }
  SeededRng root(spec.seed);
  SeededRng a_stream = root.substream("A");
  SeededRng b_stream = root.substream("b");

  constexpr int kMaxAttempts = 100;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    try {
      PlantedInstance out;
      ProblemInstance& inst = out.instance;
      inst.n = spec.n;
      inst.d = spec.d;
      inst.A = conditioned_matrix(spec, a_stream);
      inst.b = draw_b(spec, b_stream);
      if (norm_inf(inst.b) == 0.0) continue;
      bool floor_ok = true;
      for (double bi : inst.b) floor_ok = floor_ok && std::abs(bi) >= spec.b_floor;
      if (!floor_ok) continue;

      inst.c.assign(spec.d, 0.0);
      inst.w.assign(spec.n, 1.0);  // placeholder, w does not enter the state
      out.x_star.assign(spec.d, 0.0);

      const LeverageState st = build_state(inst, out.x_star);
      const SpectralProfile prof = spectral_profile(st);
      out.beta = prof.beta;
      out.rcap = prof.rcap;
      out.sigma_min_a = extreme_singular_values(inst.A).sigma_min;
      const double w2 = 12000.0 * std::pow(out.beta, 3) * out.rcap +
                        spec.pd_margin / (out.sigma_min_a * out.sigma_min_a);
      if (!std::isfinite(w2) || !(w2 > 0.0)) continue;
      inst.w.assign(spec.n, std::sqrt(w2));

      inst.c = grad_lb(st);
      if (spec.clamp_c) {
        const double cn = norm2(inst.c);
        if (cn > 1.0) {
          for (double& ci : inst.c) ci /= cn;
        }
      }
      if (norm2(subtract(inst.c, grad_lb(st))) == 0.0) inst.x_star = out.x_star;
      validate_instance(inst);
      return out;
    } catch (const RankDeficient&) {
      continue;
    } catch (const ZeroResidualRow&) {
      continue;
    }
  }
  throw GenerationFailed("no valid instance after " + std::to_string(kMaxAttempts) +
                         " attempts");
}

}  // namespace levinv
