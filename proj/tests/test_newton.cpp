#include <doctest.h>

#include <cmath>
#include <sstream>

#include "levinv/errors.hpp"
#include "levinv/hessian.hpp"
#include "levinv/newton.hpp"
#include "levinv/numkit/linalg.hpp"
#include "support.hpp"

using namespace levinv;
using levinv::testing::matrix;
using levinv::testing::tiny_instance;

namespace {

PlantedInstance planted(std::size_t n, std::size_t d, std::uint64_t seed) {
  PlantSpec spec;
  spec.n = n;
  spec.d = d;
  spec.seed = seed;
  spec.kappa = 10.0;
  spec.b_floor = 0.2 / std::sqrt(static_cast<double>(n));
  spec.pd_margin = 0.1;
  return gen_planted(spec);
}

Vector on_sphere(std::size_t d, double r, SeededRng& rng) {
  Vector x = draw_normal(rng, d);
  const double len = norm2(x);
  for (double& v : x) v *= r / len;
  return x;
}

std::string strip_wall(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') line = line.substr(0, line.rfind(','));
    out += line + '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("planned_iterations") {
  CHECK(planned_iterations(1.0, 0.4) == 1);
  CHECK(planned_iterations(1.0, 1e-10) == 26);
  CHECK(planned_iterations(1e-3 * 1.0001, 1e-3) == 1);
  CHECK_THROWS_AS(planned_iterations(1.0, 1.0), BadRange);
  CHECK_THROWS_AS(planned_iterations(1.0, 0.0), BadRange);
  CHECK_THROWS_AS(planned_iterations(0.5, 1.0), BadRange);
}

TEST_CASE("config validation") {
  NewtonConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.eps0 = 0.5;
  CHECK_THROWS_AS(cfg.validate(), BadRange);
  cfg.eps0 = 0.01;
  cfg.delta = 0.1;
  CHECK_THROWS_AS(cfg.validate(), BadRange);
  cfg.delta = 0.05;
  cfg.eps = 0.0;
  CHECK_THROWS_AS(cfg.validate(), BadRange);
  cfg.eps = 1e-8;
  cfg.max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), BadRange);
}

TEST_CASE("start at the optimum converges in zero iterations") {
  const PlantedInstance pl = planted(50, 3, 4);
  const ConvergenceTrace tr = newton_exact(pl.instance, pl.x_star, NewtonConfig{}, pl.x_star);
  CHECK(tr.status == TerminalStatus::converged);
  CHECK(tr.iterations() == 0);
  REQUIRE(tr.records.size() == 1);
  CHECK(*tr.records[0].dist_to_opt == 0.0);
  CHECK(!tr.records[0].rate);
}

TEST_CASE("exact Newton contracts at rate 0.4 from a certified seed") {
  const PlantedInstance pl = planted(500, 5, 3);
  const double r0 = 0.5 * 0.2 / std::sqrt(500.0);
  SeededRng rng(17);
  const GoodnessCertificate cert = certify_goodness(pl.instance, pl.x_star, r0, 6, rng);
  CHECK(cert.l_est >= 0.1 * (1.0 - 1e-6));
  REQUIRE(cert.seed_ok(r0));
  const Vector x0 = on_sphere(5, r0, rng);

  NewtonConfig cfg;
  cfg.eps = 1e-10;
  const ConvergenceTrace tr = newton_exact(pl.instance, x0, cfg, pl.x_star);
  CHECK(tr.status == TerminalStatus::converged);
  CHECK(tr.iterations() <= planned_iterations(r0, cfg.eps));
  for (std::size_t t = 1; t < tr.records.size(); ++t) {
    const IterationRecord& prev = tr.records[t - 1];
    const IterationRecord& rec = tr.records[t];
    CHECK(rec.rows_sampled == 500);
    CHECK(*rec.dist_to_opt <= std::pow(0.4, static_cast<double>(t)) * r0);
    if (*prev.dist_to_opt > 1e-12) {
      CHECK(*rec.rate <= 0.4);
      const double eps_eff = std::max(1.0 - rec.true_lo, rec.true_hi - 1.0);
      CHECK(*rec.dist_to_opt <=
            one_step_bound(eps_eff, *prev.dist_to_opt, cert.l_est, cert.m_est));
    }
  }
}

TEST_CASE("exact mode is deterministic") {
  const PlantedInstance pl = planted(80, 3, 8);
  SeededRng rng(2);
  const Vector x0 = on_sphere(3, 1e-3, rng);
  const ConvergenceTrace a = newton_exact(pl.instance, x0, NewtonConfig{}, pl.x_star);
  const ConvergenceTrace b = newton_exact(pl.instance, x0, NewtonConfig{}, pl.x_star);
  CHECK(strip_wall(trace_to_csv(a)) == strip_wall(trace_to_csv(b)));
  CHECK(a.x_final == b.x_final);
}

TEST_CASE("unknown optimum stops on the gradient tolerance") {
  const PlantedInstance pl = planted(80, 3, 8);
  SeededRng rng(2);
  const Vector x0 = on_sphere(3, 1e-3, rng);
  const ConvergenceTrace tr = newton_exact(pl.instance, x0, NewtonConfig{});
  CHECK(tr.status == TerminalStatus::converged);
  CHECK(tr.records.back().grad_norm <= 1e-10 * (1.0 + tr.records.front().grad_norm));
  CHECK(!tr.records.back().dist_to_opt);
  CHECK(trace_to_csv(tr).find(",,") != std::string::npos);
}

TEST_CASE("max iterations status") {
  const auto bc = levinv::testing::battery_case(30, 3, 4);
  NewtonConfig cfg;
  cfg.max_iters = 1;
  cfg.grad_tol = 1e-300;
  const ConvergenceTrace tr = newton_exact(bc.inst, bc.x, cfg);
  CHECK(tr.status == TerminalStatus::max_iters);
  CHECK(tr.records.size() == 2);
}

TEST_CASE("infeasible start is rejected") {
  const ProblemInstance inst =
      tiny_instance(matrix(2, 2, {1, 0, 0, 1}), {1, 0}, {0, 0}, {1, 1});
  CHECK_THROWS_AS(newton_exact(inst, Vector{1.0, 5.0}, NewtonConfig{}), ZeroResidualRow);
}

TEST_CASE("sketched mode degenerates to exact Newton when every row is kept") {
  const ProblemInstance inst = tiny_instance(
      matrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}), {0.5, -0.4, 0.3}, {0.2, 0.1, -0.3}, {1.5, 2.0, 0.7});
  const Vector x0{0.05, -0.02, 0.01};
  const Vector x_star{0.0, 0.0, 0.0};
  NewtonConfig cfg;
  cfg.hessian_mode = HessianMode::gauss_newton;
  cfg.eps = 1e-12;
  const ConvergenceTrace ex = newton_exact(inst, x0, cfg, x_star);
  SeededRng rng(1);
  const ConvergenceTrace sk = newton_sketched(inst, x0, cfg, rng, x_star);
  REQUIRE(ex.records.size() == sk.records.size());
  for (std::size_t t = 0; t < ex.records.size(); ++t) {
    CHECK(*sk.records[t].dist_to_opt ==
          doctest::Approx(*ex.records[t].dist_to_opt).epsilon(1e-12));
    if (t > 0) CHECK(sk.records[t].rows_sampled == 3);
  }
}

TEST_CASE("sketched Newton on a planted instance") {
  const PlantedInstance pl = planted(500, 5, 3);
  SeededRng xrng(5);
  const Vector x0 = on_sphere(5, 1e-3, xrng);
  NewtonConfig cfg;
  cfg.hessian_mode = HessianMode::gauss_newton;
  cfg.eps = 1e-8;
  SeededRng rng = SeededRng(3).substream("sketch");
  const ConvergenceTrace tr = newton_sketched(pl.instance, x0, cfg, rng, pl.x_star);
  CHECK(tr.status == TerminalStatus::converged);
  const std::size_t horizon = planned_iterations(1e-3, cfg.eps);
  CHECK(tr.horizon == horizon);
  const std::size_t cap = nnz_cap(500 * horizon, 5, cfg.eps0, cfg.delta);
  for (std::size_t t = 1; t < tr.records.size(); ++t) {
    CHECK(*tr.records[t].rate <= 0.5);
    CHECK(tr.records[t].rows_sampled <= cap);
    CHECK(tr.records[t].hessian_dev < 1e-2);
  }
}

TEST_CASE("sketched Newton with a thin sketch still converges") {
  const PlantedInstance pl = planted(2000, 4, 12);
  SeededRng xrng(6);
  const Vector x0 = on_sphere(4, 1e-3, xrng);
  NewtonConfig cfg;
  cfg.hessian_mode = HessianMode::gauss_newton;
  cfg.eps = 1e-8;
  cfg.eps0 = 0.09;
  cfg.sketch_constant = 0.2;
  SeededRng rng(44);
  const ConvergenceTrace tr = newton_sketched(pl.instance, x0, cfg, rng, pl.x_star);
  CHECK(tr.status == TerminalStatus::converged);
  bool thinned = false;
  for (std::size_t t = 1; t < tr.records.size(); ++t) {
    thinned = thinned || tr.records[t].rows_sampled < 2000;
    CHECK(*tr.records[t].rate <= 0.5);
  }
  CHECK(thinned);
}

TEST_CASE("sketched mode is deterministic per seed") {
  const PlantedInstance pl = planted(300, 3, 6);
  SeededRng xrng(1);
  const Vector x0 = on_sphere(3, 1e-3, xrng);
  NewtonConfig cfg;
  cfg.mode = SolveMode::sketched;
  cfg.hessian_mode = HessianMode::gauss_newton;
  cfg.eps0 = 0.09;
  cfg.sketch_constant = 0.5;
  cfg.seed = 99;
  const ConvergenceTrace a = solve(pl.instance, x0, cfg, pl.x_star);
  const ConvergenceTrace b = solve(pl.instance, x0, cfg, pl.x_star);
  CHECK(strip_wall(trace_to_csv(a)) == strip_wall(trace_to_csv(b)));
}

TEST_CASE("certify_goodness conventions") {
  const PlantedInstance pl = planted(60, 3, 2);
  SeededRng rng(3);
  const GoodnessCertificate zero = certify_goodness(pl.instance, pl.x_star, 0.0, 5, rng);
  CHECK(zero.m_est == 0.0);
  CHECK(zero.seed_ok(0.0));
  CHECK(zero.empirical);
  CHECK(zero.l_est >= 0.1 * (1.0 - 1e-6));
  CHECK_THROWS_AS(certify_goodness(pl.instance, pl.x_star, -1.0, 5, rng), BadRange);

  const GoodnessCertificate c = certify_goodness(pl.instance, pl.x_star, 1e-3, 4, rng);
  CHECK(c.m_est > 0.0);
  CHECK(c.seed_ok(c.seed_radius()));
  CHECK(!c.seed_ok(2.0 * c.seed_radius()));
  // Lipschitz bound from the paper at the planted point.
  CHECK(c.m_est <= 1024000.0 * std::pow(pl.beta, -7.0) * std::pow(pl.rcap, 6.0));
}

TEST_CASE("one_step_bound") {
  CHECK(one_step_bound(0.0, 1.0, 1.0, 0.0) == 0.0);
  CHECK(one_step_bound(0.1, 1.0, 1.0, 0.0) == doctest::Approx(0.2));
  CHECK(std::isinf(one_step_bound(0.0, 1.0, 1.0, 1.0)));
}

TEST_CASE("trace CSV layout") {
  const PlantedInstance pl = planted(40, 2, 1);
  SeededRng rng(4);
  const Vector x0 = on_sphere(2, 1e-3, rng);
  const std::string csv = trace_to_csv(newton_exact(pl.instance, x0, NewtonConfig{}, pl.x_star));
  CHECK(csv.rfind("iter,loss,grad_norm,dist_to_opt,rate,rows_sampled,hessian_dev,wall_ms\n", 0) == 0);
  const auto footer = csv.rfind("# status=Converged");
  CHECK(footer != std::string::npos);
  CHECK(csv.back() == '\n');
}
