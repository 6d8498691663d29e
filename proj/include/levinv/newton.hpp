#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levinv/hessian.hpp"
#include "levinv/numkit/dense_matrix.hpp"
#include "levinv/numkit/rng.hpp"
#include "levinv/problem.hpp"
#include "levinv/sketch.hpp"

namespace levinv {

enum class SolveMode { exact, sketched };
enum class TerminalStatus { converged, max_iters, hessian_failure };

const char* to_string(SolveMode m) noexcept;
const char* to_string(HessianMode m) noexcept;
const char* to_string(TerminalStatus s) noexcept;

struct NewtonConfig {
  SolveMode mode = SolveMode::exact;
  HessianMode hessian_mode = HessianMode::full;
  double eps = 1e-10;
  double eps0 = 0.01;
  double delta = 0.05;
  std::size_t max_iters = 100;
  /// Used only when the optimum is unknown. Negative selects
  /// 1e-10 * (1 + initial grad norm).
  double grad_tol = -1.0;
  std::uint64_t seed = 0;
  double sketch_constant = kDefaultSketchConstant;

  /// Throws BadRange.
  void validate() const;
};

struct IterationRecord {
  std::size_t t = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  std::optional<double> dist_to_opt;
  std::optional<double> rate;  ///< r_t / r_{t-1}
  std::size_t rows_sampled = 0;
  /// ||H - A^T D_diag A|| / ||H|| for the step taken from this iterate;
  /// 0 in exact mode.
  double hessian_dev = 0.0;
  double wall_ms = 0.0;
  std::size_t backtracks = 0;  ///< halvings needed to reach this iterate
  /// Generalized-eigenvalue range of the step matrix against A^T D_diag A and
  /// against H. Both equal 1 in exact mode. NaN when not measured.
  double surrogate_lo = 1.0;
  double surrogate_hi = 1.0;
  double true_lo = 1.0;
  double true_hi = 1.0;
};

struct ConvergenceTrace {
  std::vector<IterationRecord> records;
  TerminalStatus status = TerminalStatus::max_iters;
  Vector x_final;
  NewtonConfig config;
  std::size_t horizon = 0;  ///< T used for the per-iteration budget delta / T
  std::size_t backtrack_events = 0;
  std::string failure;      ///< solver message on hessian_failure

  std::size_t iterations() const noexcept {
    return records.empty() ? 0 : records.back().t;
  }
};

/// ceil(log(r0/eps) / log(2.5)). Throws BadRange unless r0 > eps > 0.
std::size_t planned_iterations(double r0, double eps);

/// x_star may be empty. Throws ZeroResidualRow when an iterate stays
/// infeasible after 20 halvings of the step.
ConvergenceTrace newton_exact(const ProblemInstance& inst, std::span<const double> x0,
                              const NewtonConfig& cfg,
                              std::span<const double> x_star = {});

ConvergenceTrace newton_sketched(const ProblemInstance& inst, std::span<const double> x0,
                                 const NewtonConfig& cfg, SeededRng& rng,
                                 std::span<const double> x_star = {});

/// Dispatches on cfg.mode. The sketch stream is derived from cfg.seed.
ConvergenceTrace solve(const ProblemInstance& inst, std::span<const double> x0,
                       const NewtonConfig& cfg, std::span<const double> x_star = {});

/// Empirical (l, M) estimates around x_star.
struct GoodnessCertificate {
  double l_est = 0.0;  ///< min eigenvalue of H over x_star and sampled points
  double m_est = 0.0;  ///< max ||H(x) - H(y)|| / ||x - y|| over sampled pairs
  double radius = 0.0;
  std::size_t samples = 0;
  bool empirical = true;

  /// r0 * M <= 0.1 l with l > 0.
  bool seed_ok(double r0) const noexcept;
  /// Largest r0 passing seed_ok; infinity when m_est = 0 and l_est > 0.
  double seed_radius() const noexcept;
};

GoodnessCertificate certify_goodness(const ProblemInstance& inst,
                                     std::span<const double> x_star, double radius,
                                     std::size_t samples, SeededRng& rng);

/// 2 (eps_eff + M r / (l - M r)) r; infinity when l <= M r.
double one_step_bound(double eps_eff, double r, double l, double m);

/// Trace CSV with a trailing "# status=..." line.
std::string trace_to_csv(const ConvergenceTrace& trace);

}  // namespace levinv
