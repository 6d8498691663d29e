#include "levinv/newton.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "levinv/calculus.hpp"
#include "levinv/errors.hpp"
#include "levinv/leverage.hpp"
#include "levinv/numkit/linalg.hpp"

namespace levinv {
namespace {

constexpr int kMaxHalvings = 20;
constexpr double kDiagFloor = 1e-12;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double distance(std::span<const double> a, std::span<const double> b) {
  return norm2(subtract(a, b));
}

// Takes x - step, halving until every residual row clears the feasibility
// tolerance.
Vector feasible_step(const ProblemInstance& inst, std::span<const double> x,
                     std::span<const double> step, std::size_t& halvings) {
  double scale = 1.0;
  for (int k = 0; k <= kMaxHalvings; ++k) {
    Vector cand(x.begin(), x.end());
    for (std::size_t j = 0; j < cand.size(); ++j) cand[j] -= scale * step[j];
    const FeasibilityReport rep = validate_at(inst, cand);
    if (rep.pass) {
      halvings = static_cast<std::size_t>(k);
      return cand;
    }
    if (k == kMaxHalvings) {
      throw ZeroResidualRow("newton: iterate infeasible after " +
                                std::to_string(kMaxHalvings) + " halvings at row " +
                                std::to_string(rep.worst_row),
                            rep.worst_row);
    }
    scale *= 0.5;
  }
  return {};  // unreachable
}

struct StepPlan {
  DenseMatrix h_step;
  std::size_t rows = 0;
  double hessian_dev = 0.0;
  double surrogate_lo = 1.0, surrogate_hi = 1.0;
  double true_lo = 1.0, true_hi = 1.0;
};

std::pair<double, double> range_or_nan(const DenseMatrix& p, const DenseMatrix& q, double eps0) {
  try {
    const SandwichResult r = sandwich_range(p, q, eps0);
    return {r.lo, r.hi};
  } catch (const NotPositiveDefinite&) {
    return {kNan, kNan};
  }
}

class Solver {
 public:
  Solver(const ProblemInstance& inst, const NewtonConfig& cfg, std::span<const double> x_star,
         SeededRng* rng)
      : inst_(inst), cfg_(cfg), x_star_(x_star), rng_(rng) {
    cfg_.validate();
    validate_instance(inst_);
    if (!x_star_.empty() && x_star_.size() != inst_.d) {
      throw DimensionMismatch("newton: x_star must have d entries");
    }
  }

  ConvergenceTrace run(std::span<const double> x0) {
    if (x0.size() != inst_.d) throw DimensionMismatch("newton: x0 must have d entries");
    const FeasibilityReport rep = validate_at(inst_, x0);
    if (!rep.pass) {
      throw ZeroResidualRow("newton: x0 leaves row " + std::to_string(rep.worst_row) +
                                " with a zero residual",
                            rep.worst_row);
    }
    const auto start = Clock::now();
    ConvergenceTrace trace;
    trace.config = cfg_;
    trace.horizon = cfg_.max_iters;
    if (known()) {
      const double r0 = distance(x0, x_star_);
      if (r0 > cfg_.eps) trace.horizon = std::max<std::size_t>(1, planned_iterations(r0, cfg_.eps));
    }

    Vector x(x0.begin(), x0.end());
    double grad_tol = cfg_.grad_tol;
    std::size_t halvings = 0;
    StepPlan last;
    for (std::size_t t = 0;; ++t) {
      const LeverageState state = build_state(inst_, x);
      const FirstOrder fo = first_order(state);
      const Vector g = grad_L(inst_, state, fo);

      IterationRecord rec;
      rec.t = t;
      rec.loss = loss_L(inst_, state);
      rec.grad_norm = norm2(g);
      rec.backtracks = halvings;
      rec.rows_sampled = cfg_.mode == SolveMode::exact ? inst_.n : (t == 0 ? 0 : last.rows);
      if (t > 0) {
        rec.hessian_dev = last.hessian_dev;
        rec.surrogate_lo = last.surrogate_lo;
        rec.surrogate_hi = last.surrogate_hi;
        rec.true_lo = last.true_lo;
        rec.true_hi = last.true_hi;
      }
      if (known()) {
        rec.dist_to_opt = distance(x, x_star_);
        if (t > 0 && trace.records.back().dist_to_opt.value() > 0.0) {
          rec.rate = *rec.dist_to_opt / trace.records.back().dist_to_opt.value();
        }
      }
      if (t == 0 && grad_tol < 0.0) grad_tol = 1e-10 * (1.0 + rec.grad_norm);
      rec.wall_ms = elapsed_ms(start);
      trace.records.push_back(rec);

      const bool done = known() ? *rec.dist_to_opt <= cfg_.eps : rec.grad_norm <= grad_tol;
      if (done) {
        trace.status = TerminalStatus::converged;
        break;
      }
      if (t == cfg_.max_iters) {
        trace.status = TerminalStatus::max_iters;
        break;
      }

      Vector step;
      try {
        last = cfg_.mode == SolveMode::exact ? exact_plan(state, fo)
                                             : sketched_plan(state, fo, trace.horizon);
        step = solve_spd(last.h_step, g);
      } catch (const NotPositiveDefinite& e) {
        trace.status = TerminalStatus::hessian_failure;
        trace.failure = e.what();
        break;
      }
      x = feasible_step(inst_, x, step, halvings);
      if (halvings > 0) ++trace.backtrack_events;
    }
    trace.x_final = x;
    return trace;
  }

 private:
  bool known() const noexcept { return !x_star_.empty(); }

  StepPlan exact_plan(const LeverageState& state, const FirstOrder& fo) const {
    StepPlan plan;
    plan.h_step = hessian_L(inst_, state, cfg_.hessian_mode, fo).h;
    plan.rows = inst_.n;
    return plan;
  }

  StepPlan sketched_plan(const LeverageState& state, const FirstOrder& fo,
                         std::size_t horizon) const {
    const HessianBundle hb = hessian_L(inst_, state, cfg_.hessian_mode, fo);
    const DenseMatrix* t = cfg_.hessian_mode == HessianMode::full ? &hb.t_part : nullptr;
    Vector d_diag = inner_G_diagonal(state, fo, t);
    for (std::size_t i = 0; i < d_diag.size(); ++i) {
      d_diag[i] = std::max(d_diag[i] + inst_.w[i] * inst_.w[i], kDiagFloor);
    }
    const double budget = cfg_.delta / static_cast<double>(horizon);
    const SketchedDiag sk =
        subsample_diag(inst_.A, d_diag, cfg_.eps0, budget, *rng_, cfg_.sketch_constant);

    StepPlan plan;
    plan.h_step = sketched_gram(inst_.A, sk);
    plan.rows = sk.nnz();
    const DenseMatrix surrogate = weighted_gram(inst_.A, d_diag);
    plan.hessian_dev = spectral_norm(subtract(hb.h, surrogate)) / spectral_norm(hb.h);
    std::tie(plan.surrogate_lo, plan.surrogate_hi) = range_or_nan(plan.h_step, surrogate, cfg_.eps0);
    std::tie(plan.true_lo, plan.true_hi) = range_or_nan(plan.h_step, hb.h, cfg_.eps0);
    return plan;
  }

  const ProblemInstance& inst_;
  NewtonConfig cfg_;
  std::span<const double> x_star_;
  SeededRng* rng_;
};

}  // namespace

const char* to_string(SolveMode m) noexcept {
  return m == SolveMode::exact ? "exact" : "sketched";
}

const char* to_string(HessianMode m) noexcept {
  return m == HessianMode::full ? "full" : "gauss-newton";
}

const char* to_string(TerminalStatus s) noexcept {
  switch (s) {
    case TerminalStatus::converged: return "Converged";
    case TerminalStatus::max_iters: return "MaxIters";
    case TerminalStatus::hessian_failure: return "HessianFailure";
  }
  return "?";
}

void NewtonConfig::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw BadRange("eps must be > 0");
  if (!(eps0 > 0.0 && eps0 < 0.1)) throw BadRange("eps0 must lie in (0, 0.1)");
  if (!(delta > 0.0 && delta < 0.1)) throw BadRange("delta must lie in (0, 0.1)");
  if (max_iters < 1) throw BadRange("max_iters must be >= 1");
  if (!(sketch_constant > 0.0)) throw BadRange("sketch constant must be > 0");
}

std::size_t planned_iterations(double r0, double eps) {
  if (!(eps > 0.0) || !(r0 > eps) || !std::isfinite(r0)) {
    throw BadRange("planned_iterations needs r0 > eps > 0");
  }
  const double t = std::ceil(std::log(r0 / eps) / std::log(2.5));
  std::size_t out = static_cast<std::size_t>(std::max(1.0, t));
  // Guard the ceiling against log rounding at exact powers.
  while (out > 1 && std::pow(0.4, static_cast<double>(out - 1)) * r0 <= eps) --out;
  while (std::pow(0.4, static_cast<double>(out)) * r0 > eps) ++out;
  return out;
}

ConvergenceTrace newton_exact(const ProblemInstance& inst, std::span<const double> x0,
                              const NewtonConfig& cfg, std::span<const double> x_star) {
  NewtonConfig c = cfg;
  c.mode = SolveMode::exact;
  return Solver(inst, c, x_star, nullptr).run(x0);
}

ConvergenceTrace newton_sketched(const ProblemInstance& inst, std::span<const double> x0,
                                 const NewtonConfig& cfg, SeededRng& rng,
                                 std::span<const double> x_star) {
  NewtonConfig c = cfg;
  c.mode = SolveMode::sketched;
  return Solver(inst, c, x_star, &rng).run(x0);
}

ConvergenceTrace solve(const ProblemInstance& inst, std::span<const double> x0,
                       const NewtonConfig& cfg, std::span<const double> x_star) {
  if (cfg.mode == SolveMode::exact) return newton_exact(inst, x0, cfg, x_star);
  SeededRng rng = SeededRng(cfg.seed).substream("sketch");
  return newton_sketched(inst, x0, cfg, rng, x_star);
}

bool GoodnessCertificate::seed_ok(double r0) const noexcept {
  return l_est > 0.0 && r0 * m_est <= 0.1 * l_est;
}

double GoodnessCertificate::seed_radius() const noexcept {
  if (!(l_est > 0.0)) return 0.0;
  if (m_est == 0.0) return std::numeric_limits<double>::infinity();
  return 0.1 * l_est / m_est;
}

GoodnessCertificate certify_goodness(const ProblemInstance& inst,
                                     std::span<const double> x_star, double radius,
                                     std::size_t samples, SeededRng& rng) {
  if (!(radius >= 0.0)) throw BadRange("certify_goodness: radius must be >= 0");
  GoodnessCertificate cert;
  cert.radius = radius;
  cert.samples = samples;

  auto hess_at = [&](std::span<const double> x) {
    return hessian_L(inst, build_state(inst, x), HessianMode::full).h;
  };
  auto min_eig = [](const DenseMatrix& h) { return symmetric_eigenvalues(h).front(); };

  cert.l_est = min_eig(hess_at(x_star));
  if (radius == 0.0 || samples == 0) return cert;

  const std::vector<PointPair> pairs = sample_pairs(inst, x_star, radius, samples, rng);
  for (const PointPair& pp : pairs) {
    const DenseMatrix hx = hess_at(pp.x);
    const DenseMatrix hy = hess_at(pp.y);
    cert.l_est = std::min({cert.l_est, min_eig(hx), min_eig(hy)});
    const double gap = distance(pp.x, pp.y);
    if (gap > 0.0) cert.m_est = std::max(cert.m_est, spectral_norm(subtract(hx, hy)) / gap);
  }
  return cert;
}

double one_step_bound(double eps_eff, double r, double l, double m) {
  const double mr = m * r;
  if (!(l > mr)) return std::numeric_limits<double>::infinity();
  return 2.0 * (eps_eff + mr / (l - mr)) * r;
}

std::string trace_to_csv(const ConvergenceTrace& trace) {
  std::string out = "iter,loss,grad_norm,dist_to_opt,rate,rows_sampled,hessian_dev,wall_ms\n";
  for (const IterationRecord& r : trace.records) {
    out += std::to_string(r.t) + ',' + format_double(r.loss) + ',' + format_double(r.grad_norm) + ',';
    if (r.dist_to_opt) out += format_double(*r.dist_to_opt);
    out += ',';
    if (r.rate) out += format_double(*r.rate);
    out += ',' + std::to_string(r.rows_sampled) + ',' + format_double(r.hessian_dev) + ',' +
           format_double(r.wall_ms) + '\n';
  }
  const NewtonConfig& c = trace.config;
  out += "# status=" + std::string(to_string(trace.status)) + " mode=" + to_string(c.mode) +
         " hessian=" + to_string(c.hessian_mode) + " eps=" + format_double(c.eps) +
         " eps0=" + format_double(c.eps0) + " delta=" + format_double(c.delta) +
         " max_iters=" + std::to_string(c.max_iters) + " seed=" + std::to_string(c.seed) +
         " horizon=" + std::to_string(trace.horizon) +
         " backtracks=" + std::to_string(trace.backtrack_events) + '\n';
  return out;
}

}  // namespace levinv
