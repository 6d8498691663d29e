#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "levinv/calculus.hpp"
#include "levinv/errors.hpp"
#include "levinv/hessian.hpp"
#include "levinv/leverage.hpp"
#include "levinv/numkit/linalg.hpp"
#include "support.hpp"

using namespace levinv;
using levinv::testing::matrix;
using levinv::testing::tiny_instance;

namespace fs = std::filesystem;

namespace {

PlantSpec small_spec() {
  PlantSpec spec;
  spec.n = 8;
  spec.d = 2;
  spec.seed = 7;
  spec.kappa = 10.0;
  spec.b_floor = 0.5;
  spec.pd_margin = 0.1;
  return spec;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "levinv_test_problem";
  fs::create_directories(dir);
  return dir / name;
}

std::string valid_json(const std::string& n, const std::string& w) {
  return "{\"format_version\": 1, \"n\": " + n +
         ", \"d\": 2, \"A\": [1,0,0,1], \"b\": [1,1], \"c\": [0,0], \"w\": " + w + "}";
}

}  // namespace

TEST_CASE("validate_at examples") {
  const ProblemInstance inst = tiny_instance(DenseMatrix::identity(2), {1, 1}, {0, 0}, {1, 1});
  const FeasibilityReport ok = validate_at(inst, Vector{0, 0});
  CHECK(ok.pass);
  CHECK(ok.min_abs_residual == 1.0);

  const ProblemInstance zero = tiny_instance(DenseMatrix::identity(2), {1, 0}, {0, 0}, {1, 1});
  const FeasibilityReport bad = validate_at(zero, Vector{1, 5});
  CHECK(!bad.pass);
  CHECK(bad.worst_row == 0);  // 0-based
  CHECK(bad.min_abs_residual == 0.0);
  CHECK(bad.tolerance == doctest::Approx(1e-10 * (1.0 + 1.0 + 1.0 * 5.0)));
  CHECK_THROWS_AS(validate_at(inst, Vector{0, 0, 0}), DimensionMismatch);

  const PlantedInstance pl = gen_planted(small_spec());
  CHECK(validate_at(pl.instance, Vector(2, 0.0)).pass);
}

TEST_CASE("gen_planted small example") {
  const PlantedInstance pl = gen_planted(small_spec());
  const LeverageState st = build_state(pl.instance, pl.x_star);
  CHECK(norm2(grad_L(pl.instance, st)) <= 1e-10);
  CHECK(pl.instance.x_star == Vector{0.0, 0.0});
  const DenseMatrix h = hessian_L(pl.instance, st, HessianMode::full).h;
  CHECK(symmetric_eigenvalues(h).front() >= 0.1 * (1.0 - 1e-6));
  for (double b : pl.instance.b) CHECK(std::abs(b) >= 0.5);
}

TEST_CASE("gen_planted properties across seeds") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PlantSpec spec;
    spec.n = 30 + 10 * seed;
    spec.d = 1 + seed % 5;
    spec.seed = seed;
    spec.kappa = std::pow(10.0, static_cast<double>(seed % 4));
    spec.b_floor = 0.3 / std::sqrt(static_cast<double>(spec.n));
    spec.pd_margin = 0.05 + 0.05 * (seed % 3);
    const PlantedInstance pl = gen_planted(spec);
    const ProblemInstance& inst = pl.instance;
    CHECK_NOTHROW(validate_instance(inst));
    CHECK(validate_at(inst, Vector(spec.d, 0.0)).pass);
    CHECK(norm2(inst.b) <= 1.0);
    if (spec.d > 1) {
      const SingularExtremes se = extreme_singular_values(inst.A);
      CHECK(se.sigma_max / se.sigma_min == doctest::Approx(spec.kappa).epsilon(0.05));
    }
    const double w2_floor = 12000.0 * std::pow(pl.beta, 3) * pl.rcap +
                            spec.pd_margin / (pl.sigma_min_a * pl.sigma_min_a);
    for (double w : inst.w) {
      CHECK(w == inst.w[0]);
      CHECK(w * w >= w2_floor * (1.0 - 1e-12));
    }
    const LeverageState st = build_state(inst, Vector(spec.d, 0.0));
    CHECK(norm2(grad_L(inst, st)) <= 1e-10 * (1.0 + inst.w[0] * inst.w[0]));
    CHECK(symmetric_eigenvalues(hessian_L(inst, st, HessianMode::full).h).front() >=
          spec.pd_margin * (1.0 - 1e-6));
    CHECK(gen_planted(spec).instance == inst);
  }
}

TEST_CASE("gen_planted clamp and errors") {
  PlantSpec spec = small_spec();
  spec.clamp_c = true;
  const PlantedInstance pl = gen_planted(spec);
  CHECK(norm2(pl.instance.c) <= 1.0 + 1e-15);

  PlantSpec bad = small_spec();
  bad.b_floor = 1.5;
  CHECK_THROWS_AS(gen_planted(bad), GenerationFailed);
  bad = small_spec();
  bad.n = 1;
  CHECK_THROWS_AS(gen_planted(bad), BadRange);
  bad = small_spec();
  bad.kappa = 0.5;
  CHECK_THROWS_AS(gen_planted(bad), BadRange);
  bad = small_spec();
  bad.pd_margin = 0.0;
  CHECK_THROWS_AS(gen_planted(bad), BadRange);
}

TEST_CASE("save and load round trip is exact") {
  const PlantedInstance pl = gen_planted(small_spec());
  const fs::path path = scratch("roundtrip.json");
  save_instance(pl.instance, path);
  const ProblemInstance back = load_instance(path);
  CHECK(back == pl.instance);
  CHECK(instance_to_json(back) == instance_to_json(pl.instance));
  CHECK(!fs::exists(path.string() + ".tmp"));

  auto bc = levinv::testing::battery_case(20, 3, 2);
  CHECK(instance_from_json(instance_to_json(bc.inst)) == bc.inst);
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("instance parse errors") {
  CHECK_NOTHROW(instance_from_json(valid_json("2", "[1,1]")));
  CHECK_THROWS_AS(instance_from_json(valid_json("1", "[1]")), ParseError);
  CHECK_THROWS_AS(instance_from_json(valid_json("2", "[1,0]")), ParseError);
  CHECK_THROWS_AS(instance_from_json(valid_json("2", "[1]")), ParseError);
  CHECK_THROWS_AS(instance_from_json("{\"n\": 2}"), ParseError);
  CHECK_THROWS_AS(instance_from_json("[1, 2]"), ParseError);
  try {
    instance_from_json("{\n\"format_version\": 1,\n\"n\": ,\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    instance_from_json(valid_json("2", "[1,-1]"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("'w'") != std::string::npos);
  }
  const std::string rank_def =
      "{\"format_version\": 1, \"n\": 2, \"d\": 2, \"A\": [1,1,1,1], \"b\": [1,1], "
      "\"c\": [0,0], \"w\": [1,1]}";
  CHECK_THROWS_AS(instance_from_json(rank_def), ParseError);
  CHECK_THROWS_AS(load_instance(scratch("missing.json")), std::exception);
}

TEST_CASE("validate_instance") {
  ProblemInstance inst = tiny_instance(DenseMatrix::identity(2), {1, 1}, {0, 0}, {1, 1});
  CHECK_NOTHROW(validate_instance(inst));
  inst.w[1] = 0.0;
  CHECK_THROWS_AS(validate_instance(inst), NonPositiveWeight);
  inst.w[1] = 1.0;
  inst.c = {0.0};
  CHECK_THROWS_AS(validate_instance(inst), DimensionMismatch);
  inst.c = {0.0, 0.0};
  inst.x_star = {1.0};
  CHECK_THROWS_AS(validate_instance(inst), DimensionMismatch);
}
