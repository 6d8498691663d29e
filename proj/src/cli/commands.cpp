#include "levinv/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "levinv/calculus.hpp"
#include "levinv/errors.hpp"
#include "levinv/hessian.hpp"
#include "levinv/leverage.hpp"
#include "levinv/newton.hpp"
#include "levinv/numkit/linalg.hpp"
#include "levinv/numkit/rng.hpp"
#include "levinv/oracle.hpp"
#include "levinv/problem.hpp"
#include "levinv/sketch.hpp"

#ifndef LEVINV_VERSION
#define LEVINV_VERSION "0.0.0"
#endif

namespace levinv::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::system_clock;

std::string iso_utc(Clock::time_point tp) {
  const std::time_t t = Clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path manifest_path(const fs::path& artifact) {
  fs::path p = artifact;
  p += ".manifest.json";
  return p;
}

void write_manifest(const fs::path& artifact, const std::string& command, json config,
                    std::uint64_t seed, int exit_code, Clock::time_point started) {
  json m;
  m["command"] = command;
  m["tool_version"] = LEVINV_VERSION;
  m["seed"] = seed;
  m["config"] = std::move(config);
  m["artifacts"] = json::array({artifact.string()});
  m["exit_code"] = exit_code;
  m["started_utc"] = iso_utc(started);
  m["finished_utc"] = iso_utc(Clock::now());
  write_file_atomic(manifest_path(artifact), m.dump(2) + "\n");
}

int classify(const std::exception& e, std::ostream& log) {
  log << "error: " << e.what() << "\n";
  if (dynamic_cast<const GenerationFailed*>(&e)) return kGeneration;
  if (dynamic_cast<const NotPositiveDefinite*>(&e) || dynamic_cast<const ZeroResidualRow*>(&e) ||
      dynamic_cast<const RankDeficient*>(&e) || dynamic_cast<const ProbeInfeasible*>(&e) ||
      dynamic_cast<const HypothesisViolated*>(&e)) {
    return kNumeric;
  }
  return kUsage;
}

double parse_real(std::string_view text, const char* what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw BadRange(std::string(what) + ": cannot parse '" + std::string(text) + "'");
  }
  return v;
}

// Radius that keeps every residual at least 3/4 of |b_i| around the origin.
double small_radius(const ProblemInstance& inst) {
  double bmin = std::abs(inst.b[0]);
  for (double b : inst.b) bmin = std::min(bmin, std::abs(b));
  return 0.25 * bmin / spectral_norm(inst.A);
}

Vector parse_x0(const std::string& spec, const ProblemInstance& inst, SeededRng rng) {
  if (spec == "zero") return Vector(inst.d, 0.0);
  constexpr std::string_view prefix = "random:";
  if (spec.rfind(prefix, 0) != 0) {
    throw BadRange("--x0 must be zero, random:small or random:<radius>, got '" + spec + "'");
  }
  const std::string_view arg = std::string_view(spec).substr(prefix.size());
  const double r = arg == "small" ? small_radius(inst) : parse_real(arg, "--x0 radius");
  if (!(r >= 0.0)) throw BadRange("--x0 radius must be >= 0");
  Vector x = draw_normal(rng, inst.d);
  const double len = norm2(x);
  for (double& v : x) v *= r / len;
  return x;
}

HessianMode parse_hessian(const std::string& text, SolveMode mode) {
  if (text.empty()) return mode == SolveMode::exact ? HessianMode::full : HessianMode::gauss_newton;
  if (text == "full") return HessianMode::full;
  if (text == "gauss-newton") return HessianMode::gauss_newton;
  throw BadRange("--hessian must be full or gauss-newton");
}

SolveMode parse_mode(const std::string& text) {
  if (text == "exact") return SolveMode::exact;
  if (text == "sketched") return SolveMode::sketched;
  throw BadRange("--mode must be exact or sketched");
}

int status_code(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::converged: return kOk;
    case TerminalStatus::max_iters: return kNonConvergence;
    case TerminalStatus::hessian_failure: return kNumeric;
  }
  return kNumeric;
}

// ---- verify -----------------------------------------------------------------

struct ReportRow {
  std::string check;
  std::string metric;
  double value = 0.0;
  double threshold = 0.0;
  std::string verdict;  ///< pass, fail or skip
};

ReportRow at_most(std::string check, std::string metric, double value, double threshold) {
  return {std::move(check), std::move(metric), value, threshold,
          value <= threshold ? "pass" : "fail"};
}

ReportRow at_least(std::string check, std::string metric, double value, double threshold) {
  return {std::move(check), std::move(metric), value, threshold,
          value >= threshold ? "pass" : "fail"};
}

class Verifier {
 public:
  Verifier(const ProblemInstance& inst, Vector x, const VerifyOptions& opt)
      : inst_(inst), x_(std::move(x)), opt_(opt), state_(build_state(inst_, x_)) {}

  void run(const std::string& check, std::vector<ReportRow>& rows) {
    if (check == "grad") return grad(rows);
    if (check == "jac") return jac(rows);
    if (check == "hess") return hess(rows);
    if (check == "sigma") return sigma(rows);
    if (check == "sketch") return sketch(rows);
    if (check == "bounds") return bounds(rows);
    if (check == "rate") return rate(rows);
    throw BadRange("unknown check '" + check + "'");
  }

 private:
  double loss_at(std::span<const double> y) const { return loss_L(inst_, build_state(inst_, y)); }

  void grad(std::vector<ReportRow>& rows) const {
    const Vector fd = oracle::fd_gradient([&](auto y) { return loss_at(y); }, x_, {1e-5, false});
    rows.push_back(at_most("grad", "rel_err_vs_fd",
                           oracle::relative_error(grad_L(inst_, state_), fd), 1e-6));
  }

  void jac(std::vector<ReportRow>& rows) const {
    const DenseMatrix fd = oracle::fd_jacobian(
        [&](auto y) { return grad_lb(build_state(inst_, y)); }, x_, {1e-5, false});
    const DenseMatrix j = jacobian_g(state_);
    rows.push_back(at_most("jac", "rel_err_vs_fd", oracle::relative_error(j, fd), 1e-5));
    rows.push_back(at_most("jac", "asymmetry", asymmetry(j), 1e-9 * (1.0 + spectral_norm(j))));
  }

  void hess(std::vector<ReportRow>& rows) const {
    const DenseMatrix fd =
        oracle::fd_hessian([&](auto y) { return loss_at(y); }, x_, {1e-4, true});
    const DenseMatrix h = hessian_L(inst_, state_, HessianMode::full).h;
    rows.push_back(at_most("hess", "rel_err_vs_fd", oracle::relative_error(h, fd), 5e-4));
  }

  void sigma(std::vector<ReportRow>& rows) const {
    const DenseMatrix s = sigma_matrix(state_);
    rows.push_back(at_most("sigma", "qr_vs_gram_inverse_max_abs",
                           max_abs(subtract(oracle::brute_sigma(state_.ax), s)), 1e-9));
    rows.push_back(at_most("sigma", "idempotency_max_abs", max_abs(subtract(multiply(s, s), s)),
                           1e-10));
    double trace = 0.0, fmax = 0.0, fmin = 1.0;
    for (double f : state_.f) {
      trace += f;
      fmax = std::max(fmax, f);
      fmin = std::min(fmin, f);
    }
    rows.push_back(at_most("sigma", "trace_minus_d_abs",
                           std::abs(trace - static_cast<double>(inst_.d)), 1e-8));
    rows.push_back(at_most("sigma", "max_score", fmax, 1.0 + 1e-12));
    rows.push_back(at_least("sigma", "min_score", fmin, 0.0));
  }

  void sketch(std::vector<ReportRow>& rows) const {
    const FirstOrder fo = first_order(state_);
    Vector dd = inner_G_diagonal(state_, fo, nullptr);
    for (std::size_t i = 0; i < dd.size(); ++i) dd[i] = std::max(dd[i] + inst_.w[i] * inst_.w[i], 1e-12);
    SeededRng rng = SeededRng(opt_.seed).substream("sketch");
    const double delta = 0.05;
    const SketchedDiag sk = subsample_diag(inst_.A, dd, opt_.eps0, delta, rng);
    const SandwichResult sw = sandwich_check(inst_.A, dd, sk);
    rows.push_back(at_least("sketch", "sandwich_lo", sw.lo, 1.0 - opt_.eps0));
    rows.push_back(at_most("sketch", "sandwich_hi", sw.hi, 1.0 + opt_.eps0));
    rows.push_back(at_most("sketch", "nnz", static_cast<double>(sk.nnz()),
                           static_cast<double>(nnz_cap(inst_.n, inst_.d, opt_.eps0, delta))));
    const bool oracle_verdict = oracle::psd_order_check(
        sketched_gram(inst_.A, sk), weighted_gram(inst_.A, dd), 1.0 - opt_.eps0, 1.0 + opt_.eps0);
    rows.push_back(at_least("sketch", "verifiers_agree", oracle_verdict == sw.holds ? 1.0 : 0.0, 1.0));
  }

  void bounds(std::vector<ReportRow>& rows) const {
    SeededRng rng = SeededRng(opt_.seed).substream("pairs");
    const auto pairs = sample_pairs(inst_, x_, small_radius(inst_), 8, rng);
    BoundLedger led;
    try {
      led = bound_ledger(inst_, state_, pairs);
    } catch (const HypothesisViolated&) {
      rows.push_back({"bounds", "hypotheses", 0.0, 1.0, "fail"});
      return;
    }
    rows.push_back(at_most("bounds", "normB1", led.norm_b1, led.b1_bound));
    rows.push_back(at_most("bounds", "normB", led.norm_b, led.b_bound));
    if (led.pd_applicable) {
      rows.push_back(at_least("bounds", "pd_floor", led.pd_floor, led.implied_l * (1.0 - 1e-6)));
    } else {
      rows.push_back({"bounds", "pd_floor", led.pd_floor, led.implied_l, "skip"});
    }
    rows.push_back(at_most("bounds", "lipschitz_ratio", led.lipschitz_ratio_max, led.lipschitz_bound));
  }

  void rate(std::vector<ReportRow>& rows) const {
    if (inst_.x_star.empty()) {
      rows.push_back({"rate", "known_optimum", 0.0, 1.0, "fail"});
      return;
    }
    NewtonConfig cfg;
    cfg.eps = 1e-10;
    const ConvergenceTrace tr = newton_exact(inst_, x_, cfg, inst_.x_star);
    double worst = 0.0;
    for (std::size_t t = 1; t < tr.records.size(); ++t) {
      if (*tr.records[t - 1].dist_to_opt > 1e-12 && tr.records[t].rate) {
        worst = std::max(worst, *tr.records[t].rate);
      }
    }
    rows.push_back(at_most("rate", "max_rate", worst, 0.4));
    const double r0 = *tr.records.front().dist_to_opt;
    const double planned = r0 > cfg.eps ? static_cast<double>(planned_iterations(r0, cfg.eps)) : 0.0;
    rows.push_back(at_most("rate", "iterations", static_cast<double>(tr.iterations()), planned));
    rows.push_back(at_most("rate", "final_dist", *tr.records.back().dist_to_opt, cfg.eps));
  }

  const ProblemInstance& inst_;
  Vector x_;
  const VerifyOptions& opt_;
  LeverageState state_;
};

template <typename T>
T median(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : (v[m - 1] + v[m]) / 2;
}

}  // namespace

int cmd_gen(const GenOptions& opt, std::ostream& log) {
  const auto started = Clock::now();
  try {
    if (opt.out.empty()) throw BadRange("--out is required");
    PlantSpec spec;
    spec.n = opt.n;
    spec.d = opt.d;
    spec.seed = SeededRng(opt.seed).substream("generation").seed();
    spec.kappa = opt.kappa;
    spec.b_floor = opt.b_floor > 0.0 ? opt.b_floor
                                     : 0.2 / std::sqrt(static_cast<double>(std::max<std::size_t>(opt.n, 1)));
    spec.pd_margin = opt.pd_margin;
    spec.clamp_c = opt.clamp_c;
    const PlantedInstance pl = gen_planted(spec);
    save_instance(pl.instance, opt.out);
    json cfg{{"n", opt.n},           {"d", opt.d},
             {"kappa", opt.kappa},   {"b_floor", spec.b_floor},
             {"pd_margin", opt.pd_margin}, {"clamp_c", opt.clamp_c},
             {"out", opt.out.string()}, {"beta_at_0", pl.beta},
             {"rcap_at_0", pl.rcap}, {"weight", pl.instance.w[0]}};
    write_manifest(opt.out, "gen", std::move(cfg), opt.seed, kOk, started);
    log << "wrote " << opt.out.string() << " (n=" << opt.n << ", d=" << opt.d << ")\n";
    return kOk;
  } catch (const std::exception& e) {
    return classify(e, log);
  }
}

int cmd_solve(const SolveOptions& opt, std::ostream& log) {
  const auto started = Clock::now();
  try {
    NewtonConfig cfg;
    cfg.mode = parse_mode(opt.mode);
    cfg.hessian_mode = parse_hessian(opt.hessian, cfg.mode);
    cfg.eps = opt.eps;
    cfg.eps0 = opt.eps0;
    cfg.delta = opt.delta;
    cfg.max_iters = opt.max_iters;
    cfg.seed = opt.seed;
    cfg.sketch_constant = opt.sketch_constant;
    cfg.validate();
    if (opt.trace.empty()) throw BadRange("--trace is required");

    const ProblemInstance inst = load_instance(opt.instance);
    const Vector x0 = parse_x0(opt.x0, inst, SeededRng(opt.seed).substream("x0"));
    const ConvergenceTrace tr = solve(inst, x0, cfg, inst.x_star);
    write_file_atomic(opt.trace, trace_to_csv(tr));
    const int code = status_code(tr.status);
    json jcfg{{"instance", opt.instance.string()}, {"mode", opt.mode},
              {"hessian", to_string(cfg.hessian_mode)}, {"eps", opt.eps},
              {"eps0", opt.eps0}, {"delta", opt.delta}, {"max_iters", opt.max_iters},
              {"x0", opt.x0}, {"sketch_constant", opt.sketch_constant},
              {"trace", opt.trace.string()}, {"status", to_string(tr.status)},
              {"iterations", tr.iterations()}};
    write_manifest(opt.trace, "solve", std::move(jcfg), opt.seed, code, started);
    log << to_string(tr.status) << " after " << tr.iterations() << " iterations\n";
    if (!tr.failure.empty()) log << "solver: " << tr.failure << "\n";
    return code;
  } catch (const std::exception& e) {
    return classify(e, log);
  }
}

int cmd_verify(const VerifyOptions& opt, std::ostream& log) {
  const auto started = Clock::now();
  try {
    if (opt.report.empty()) throw BadRange("--report is required");
    std::vector<std::string> checks = opt.checks;
    if (checks.empty() || std::find(checks.begin(), checks.end(), "all") != checks.end()) {
      checks = {"grad", "jac", "hess", "sigma", "sketch", "bounds", "rate"};
    }
    if (!(opt.eps0 > 0.0 && opt.eps0 < 0.1)) throw BadRange("--eps0 must lie in (0, 0.1)");
    const ProblemInstance inst = load_instance(opt.instance);
    const Vector x = parse_x0(opt.x0, inst, SeededRng(opt.seed).substream("x0"));
    Verifier verifier(inst, x, opt);
    std::vector<ReportRow> rows;
    for (const std::string& c : checks) verifier.run(c, rows);

    std::string csv = "check,metric,value,threshold,verdict\n";
    bool ok = true;
    for (const ReportRow& r : rows) {
      csv += r.check + ',' + r.metric + ',' + format_double(r.value) + ',' +
             format_double(r.threshold) + ',' + r.verdict + '\n';
      ok = ok && r.verdict != "fail";
      log << r.check << " " << r.metric << " = " << r.value << " (" << r.verdict << ")\n";
    }
    write_file_atomic(opt.report, csv);
    const int code = ok ? kOk : kNumeric;
    json jcfg{{"instance", opt.instance.string()}, {"checks", checks}, {"x0", opt.x0},
              {"eps0", opt.eps0}, {"report", opt.report.string()}};
    write_manifest(opt.report, "verify", std::move(jcfg), opt.seed, code, started);
    return code;
  } catch (const std::exception& e) {
    return classify(e, log);
  }
}

int cmd_bench(const BenchOptions& opt, std::ostream& log) {
  const auto started = Clock::now();
  try {
    if (opt.out.empty()) throw BadRange("--out is required");
    if (opt.repeats == 0) throw BadRange("--repeats must be >= 1");
    if (opt.values.empty()) throw BadRange("--values needs at least one entry");
    if (opt.sweep != "n" && opt.sweep != "d" && opt.sweep != "eps0") {
      throw BadRange("--sweep must be n, d or eps0");
    }
    std::vector<SolveMode> modes;
    if (opt.mode == "exact" || opt.mode == "both") modes.push_back(SolveMode::exact);
    if (opt.mode == "sketched" || opt.mode == "both") modes.push_back(SolveMode::sketched);
    if (modes.empty()) throw BadRange("--mode must be exact, sketched or both");

    std::string csv =
        "sweep,value,mode,n,d,eps0,repeats,converged,median_wall_ms,median_rows_per_iter,"
        "median_iterations,nnz_cap\n";
    const SeededRng root(opt.seed);
    for (std::size_t cell = 0; cell < opt.values.size(); ++cell) {
      const double v = opt.values[cell];
      std::size_t n = opt.n, d = opt.d;
      double eps0 = opt.eps0;
      if (opt.sweep == "n") n = static_cast<std::size_t>(std::llround(v));
      if (opt.sweep == "d") d = static_cast<std::size_t>(std::llround(v));
      if (opt.sweep == "eps0") eps0 = v;

      for (SolveMode mode : modes) {
        NewtonConfig cfg;
        cfg.mode = mode;
        cfg.hessian_mode = HessianMode::gauss_newton;
        cfg.eps = opt.eps;
        cfg.eps0 = eps0;
        cfg.sketch_constant = opt.sketch_constant;
        cfg.validate();
        std::vector<double> wall, rows, iters;
        std::size_t converged = 0, cap = 0;
        for (std::size_t rep = 0; rep < opt.repeats; ++rep) {
          const SeededRng cell_rng =
              root.substream("bench/" + std::to_string(cell) + "/" + std::to_string(rep));
          PlantSpec spec;
          spec.n = n;
          spec.d = d;
          spec.seed = cell_rng.substream("generation").seed();
          spec.b_floor = 0.2 / std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1)));
          const PlantedInstance pl = gen_planted(spec);
          const Vector x0 = parse_x0("random:small", pl.instance, cell_rng.substream("x0"));
          cfg.seed = cell_rng.substream("sketching").seed();
          const auto t0 = std::chrono::steady_clock::now();
          const ConvergenceTrace tr = solve(pl.instance, x0, cfg, pl.instance.x_star);
          wall.push_back(std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0).count());
          double sum_rows = 0.0;
          for (std::size_t t = 1; t < tr.records.size(); ++t) sum_rows += tr.records[t].rows_sampled;
          rows.push_back(tr.records.size() > 1 ? sum_rows / static_cast<double>(tr.records.size() - 1)
                                               : 0.0);
          iters.push_back(static_cast<double>(tr.iterations()));
          converged += tr.status == TerminalStatus::converged ? 1 : 0;
          cap = mode == SolveMode::exact
                    ? n
                    : std::min(n, nnz_cap(n, d, eps0,
                                          cfg.delta / static_cast<double>(tr.horizon),
                                          cfg.sketch_constant));
        }
        csv += opt.sweep + ',' + format_double(v) + ',' + to_string(mode) + ',' +
               std::to_string(n) + ',' + std::to_string(d) + ',' + format_double(eps0) + ',' +
               std::to_string(opt.repeats) + ',' + std::to_string(converged) + ',' +
               format_double(median(wall)) + ',' + format_double(median(rows)) + ',' +
               format_double(median(iters)) + ',' + std::to_string(cap) + '\n';
        log << opt.sweep << "=" << v << " " << to_string(mode) << ": rows/iter "
            << median(rows) << ", " << median(wall) << " ms\n";
      }
    }
    write_file_atomic(opt.out, csv);
    json jcfg{{"sweep", opt.sweep}, {"values", opt.values}, {"repeats", opt.repeats},
              {"mode", opt.mode}, {"n", opt.n}, {"d", opt.d}, {"eps0", opt.eps0},
              {"eps", opt.eps}, {"sketch_constant", opt.sketch_constant},
              {"out", opt.out.string()}};
    write_manifest(opt.out, "bench", std::move(jcfg), opt.seed, kOk, started);
    return kOk;
  } catch (const std::exception& e) {
    return classify(e, log);
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regularized leverage-score gradient inversion with exact and sketched Newton"};
  app.set_version_flag("--version", LEVINV_VERSION);
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Generate a planted instance (optimum at x = 0)");
  g->add_option("--n", gen.n, "Rows")->required();
  g->add_option("--d", gen.d, "Columns")->required();
  g->add_option("--seed", gen.seed, "Master seed");
  g->add_option("--kappa", gen.kappa, "Condition number of A");
  g->add_option("--b-floor", gen.b_floor, "Minimum |b_i| (default 0.2/sqrt(n))");
  g->add_option("--pd-margin", gen.pd_margin, "Curvature margin l");
  g->add_flag("--clamp-c", gen.clamp_c, "Rescale c to norm <= 1 (optimum no longer known)");
  g->add_option("--out", gen.out, "Instance file")->required();

  SolveOptions sol;
  auto* s = app.add_subcommand("solve", "Run exact or sketched Newton and write a trace");
  s->add_option("--instance", sol.instance, "Instance file")->required();
  s->add_option("--mode", sol.mode, "exact | sketched");
  s->add_option("--hessian", sol.hessian, "full | gauss-newton");
  s->add_option("--eps", sol.eps, "Target accuracy");
  s->add_option("--eps0", sol.eps0, "Sketch accuracy, in (0, 0.1)");
  s->add_option("--delta", sol.delta, "Failure probability, in (0, 0.1)");
  s->add_option("--max-iters", sol.max_iters, "Iteration cap");
  s->add_option("--seed", sol.seed, "Master seed");
  s->add_option("--x0", sol.x0, "zero | random:small | random:<radius>");
  s->add_option("--sketch-constant", sol.sketch_constant, "Oversampling constant C_s");
  s->add_option("--trace", sol.trace, "Trace CSV")->required();

  VerifyOptions ver;
  auto* v = app.add_subcommand("verify", "Run oracle checks and write a report");
  v->add_option("--instance", ver.instance, "Instance file")->required();
  v->add_option("--check", ver.checks, "grad|jac|hess|sigma|sketch|bounds|rate|all (repeatable)")
      ->delimiter(',');
  v->add_option("--seed", ver.seed, "Master seed");
  v->add_option("--x0", ver.x0, "Evaluation point: zero | random:small | random:<radius>");
  v->add_option("--eps0", ver.eps0, "Sandwich width for the sketch check");
  v->add_option("--report", ver.report, "Report CSV")->required();

  BenchOptions ben;
  auto* b = app.add_subcommand("bench", "Sweep n, d or eps0 over planted instances");
  b->add_option("--sweep", ben.sweep, "n | d | eps0")->required();
  b->add_option("--values", ben.values, "Comma separated sweep values")->required()->delimiter(',');
  b->add_option("--repeats", ben.repeats, "Runs per cell");
  b->add_option("--mode", ben.mode, "exact | sketched | both");
  b->add_option("--n", ben.n, "Rows when not swept");
  b->add_option("--d", ben.d, "Columns when not swept");
  b->add_option("--eps0", ben.eps0, "Sketch accuracy when not swept");
  b->add_option("--eps", ben.eps, "Target accuracy");
  b->add_option("--sketch-constant", ben.sketch_constant, "Oversampling constant C_s");
  b->add_option("--seed", ben.seed, "Master seed");
  b->add_option("--out", ben.out, "Aggregate CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int rc = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return rc == 0 ? kOk : kUsage;
  }
  if (g->parsed()) return cmd_gen(gen, err);
  if (s->parsed()) return cmd_solve(sol, err);
  if (v->parsed()) return cmd_verify(ver, err);
  return cmd_bench(ben, err);
}

}  // namespace levinv::cli
