#include <doctest.h>

#include <cmath>

#include "levinv/errors.hpp"
#include "levinv/leverage.hpp"
#include "levinv/numkit/linalg.hpp"
#include "levinv/oracle.hpp"
#include "support.hpp"

using namespace levinv;
using levinv::testing::matrix;
using levinv::testing::tiny_instance;

namespace {

ProblemInstance three_by_two() {
  return tiny_instance(matrix(3, 2, {1, 0, 0, 1, 1, 1}), {0, 0, 0}, {0, 0}, {1, 1, 1});
}

}  // namespace

TEST_CASE("leverage_scores_plain examples") {
  const Vector sq = leverage_scores_plain(matrix(2, 2, {2, 1, 1, 3}));
  CHECK(sq[0] == doctest::Approx(1.0));
  CHECK(sq[1] == doctest::Approx(1.0));
  const Vector t = leverage_scores_plain(matrix(3, 2, {1, 0, 0, 1, 1, 1}));
  for (double v : t) CHECK(v == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  SeededRng rng(4);
  const Vector g = leverage_scores_plain(draw_gaussian(rng, 40, 6));
  double sum = 0.0;
  for (double v : g) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-12);
    sum += v;
  }
  CHECK(sum == doctest::Approx(6.0).epsilon(1e-8));
  CHECK_THROWS_AS(leverage_scores_plain(DenseMatrix(3, 2)), RankDeficient);
}

TEST_CASE("build_state examples") {
  const ProblemInstance sq = tiny_instance(DenseMatrix::identity(2), {0, 0}, {0, 0}, {1, 1});
  const LeverageState a = build_state(sq, Vector{1, 2});
  CHECK(a.s == Vector{1, 2});
  CHECK(a.ax(0, 0) == 1.0);
  CHECK(a.ax(1, 1) == 0.5);
  CHECK(a.f[0] == doctest::Approx(1.0));
  CHECK(a.f[1] == doctest::Approx(1.0));
  CHECK(max_abs(subtract(sigma_matrix(a), DenseMatrix::identity(2))) <= 1e-15);

  const LeverageState b = build_state(three_by_two(), Vector{1, 1});
  CHECK(b.s == Vector{1, 1, 2});
  CHECK(b.f[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
  CHECK(b.f[1] == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
  CHECK(b.f[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(b.f[0] + b.f[1] + b.f[2] == doctest::Approx(2.0).epsilon(1e-12));
  const Vector diag = sigma_matrix(b).diagonal_entries();
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(diag[i] - b.f[i]) <= 1e-12);

  const ProblemInstance zero = tiny_instance(DenseMatrix::identity(2), {1, 0}, {0, 0}, {1, 1});
  try {
    build_state(zero, Vector{1, 5});
    FAIL("expected ZeroResidualRow");
  } catch (const ZeroResidualRow& e) {
    CHECK(e.row() == 0);
  }
}

TEST_CASE("loss_lb examples") {
  const LeverageState b = build_state(three_by_two(), Vector{1, 1});
  CHECK(loss_lb(b, Vector{0, 0, 0}) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(loss_lb(b, b.f) == 0.0);
  const ProblemInstance sq = tiny_instance(DenseMatrix::identity(3), {0.5, 0.5, 0.5}, {0, 0, 0},
                                           {1, 1, 1});
  CHECK(loss_lb(build_state(sq, Vector{0, 0, 0}), Vector{0, 0, 0}) ==
        doctest::Approx(1.5));
}

TEST_CASE("spectral_profile examples") {
  const ProblemInstance sq = tiny_instance(DenseMatrix::identity(2), {0, 0}, {0, 0}, {1, 1});
  const SpectralProfile p = spectral_profile(build_state(sq, Vector{1, 2}));
  CHECK(p.beta == doctest::Approx(0.5));
  CHECK(p.rcap == doctest::Approx(1.0));
  const SpectralProfile q = spectral_profile(build_state(sq, Vector{2, 4}));
  CHECK(q.beta == doctest::Approx(0.25));
  CHECK(q.rcap == doctest::Approx(0.5));
  CHECK(q.at_x == Vector{2, 4});
}

TEST_CASE("projection invariants on the battery") {
  for (const auto& bc : levinv::testing::standard_battery()) {
    const LeverageState st = build_state(bc.inst, bc.x);
    const DenseMatrix sigma = sigma_matrix(st);
    CHECK(max_abs(subtract(multiply(sigma, sigma), sigma)) <= 1e-10);
    CHECK(asymmetry(sigma) <= 1e-12);
    CHECK(spectral_norm(sigma) <= 1.0 + 1e-10);
    double trace = 0.0;
    for (double f : st.f) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0 + 1e-12);
      trace += f;
    }
    CHECK(std::abs(trace - static_cast<double>(bc.inst.d)) <= 1e-8);
    if (norm2(bc.inst.b) <= 1.0) CHECK(norm_inf(st.p) <= 2.0 + 1e-10);
    CHECK(max_abs(subtract(oracle::brute_sigma(st.ax), sigma)) <= 1e-9);
    const SpectralProfile prof = spectral_profile(st);
    CHECK(prof.beta <= prof.rcap);
    CHECK(prof.beta > 0.0);
  }
}

TEST_CASE("sigma_apply matches the dense product") {
  const auto bc = levinv::testing::battery_case(50, 4, 3);
  const LeverageState st = build_state(bc.inst, bc.x);
  SeededRng rng(1);
  const Vector v = draw_normal(rng, 50);
  CHECK(oracle::relative_error(sigma_apply(st, v), matvec(sigma_matrix(st), v)) <= 1e-13);
}
