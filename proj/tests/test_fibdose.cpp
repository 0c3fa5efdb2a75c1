#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "fib_dose.hpp"

using namespace recoil;

namespace {
BeamRecipe recipe(double current, double dwell, int passes, double d,
                  double ds = 0.1) {
  BeamRecipe r;
  r.name = "t";
  r.current_na = current;
  r.dwell_us = dwell;
  r.passes = passes;
  r.beam_diameter_nm = d;
  r.beam_diameter_sigma_nm = ds;
  return r;
}

double round_3sig(double v) {
  const double scale = std::pow(10.0, std::floor(std::log10(v)) - 2.0);
  return std::round(v / scale) * scale;
}
}  // namespace

TEST_CASE("ions per dwell") {
  CHECK(std::round(ions_per_dwell(0.79, 1.0)) == 4931.0);
  CHECK(ions_per_dwell(0.0, 5.0) == 0.0);
  CHECK(ions_per_dwell(0.0077, 1.0) == doctest::Approx(48.06).epsilon(1e-3));
  CHECK_THROWS_AS(ions_per_dwell(-1.0, 1.0), InputError);
}

TEST_CASE("fluence reproduces the calibrated exposure points") {
  // highest-dose recipe: 0.79 nA, 1 us, 10 passes, d back-solved
  const FluenceEstimate p1 = fluence(recipe(0.79, 1.0, 10, 38.0078, 2.04));
  CHECK(round_3sig(p1.value_cm2) == doctest::Approx(1.30e16).epsilon(1e-9));
  // lowest main-table recipe: 0.0077 nA, 1 us, 1 pass
  const FluenceEstimate p6 = fluence(recipe(0.0077, 1.0, 1, 7.9974, 0.50));
  CHECK(round_3sig(p6.value_cm2) == doctest::Approx(2.87e14).epsilon(1e-9));
}

TEST_CASE("fluence is linear in passes, current and dwell") {
  const FluenceEstimate base = fluence(recipe(0.2, 1.0, 1, 20.0));
  CHECK(fluence(recipe(0.2, 1.0, 2, 20.0)).value_cm2 ==
        doctest::Approx(2.0 * base.value_cm2).epsilon(1e-12));
  CHECK(fluence(recipe(0.4, 1.0, 1, 20.0)).value_cm2 ==
        doctest::Approx(2.0 * base.value_cm2).epsilon(1e-12));
  CHECK(fluence(recipe(0.2, 3.0, 1, 20.0)).value_cm2 ==
        doctest::Approx(3.0 * base.value_cm2).epsilon(1e-12));
}

TEST_CASE("relative uncertainty is exactly twice the diameter's") {
  const BeamRecipe r = recipe(0.43, 1.0, 1, 29.987, 1.973);
  const FluenceEstimate est = fluence(r);
  CHECK(est.sigma_cm2 / est.value_cm2 ==
        doctest::Approx(2.0 * r.beam_diameter_sigma_nm / r.beam_diameter_nm)
            .epsilon(1e-12));
}

TEST_CASE("overlap factor: calibrated at 50%, geometric elsewhere") {
  CHECK(overlap_factor(0.5) == 3.0);
  CHECK(overlap_factor(0.0) == 1.0);
  CHECK(overlap_factor(0.25) == doctest::Approx(16.0 / 9.0));
  CHECK_FALSE(fluence(recipe(0.1, 1.0, 1, 10.0)).extrapolated_overlap);
  BeamRecipe r = recipe(0.1, 1.0, 1, 10.0);
  r.overlap_fraction = 0.25;
  CHECK(fluence(r).extrapolated_overlap);
}

TEST_CASE("recipe validation") {
  CHECK_THROWS_AS(fluence(recipe(0.1, 0.0, 1, 10.0)), InputError);
  CHECK_THROWS_AS(fluence(recipe(0.1, 1.0, 0, 10.0)), InputError);
  CHECK_THROWS_AS(fluence(recipe(0.1, 1.0, 1, 0.0)), InputError);
  BeamRecipe r = recipe(0.1, 1.0, 1, 10.0);
  r.overlap_fraction = 1.0;
  CHECK_THROWS_AS(fluence(r), InputError);
}

TEST_CASE("recipe CSV round trip and diagnostics") {
  const std::string csv =
      "# comment line\n"
      "name,current_nA,dwell_us,passes,overlap,diameter_nm,diameter_sigma_nm\n"
      "P1,0.79,1,10,0.5,38.0078,2.04\n"
      "P6,0.0077,1,1,0.5,7.9974,0.50\n";
  const auto recipes = read_recipes_csv(csv);
  REQUIRE(recipes.size() == 2);
  CHECK(recipes[0].name == "P1");
  CHECK(recipes[1].current_na == 0.0077);

  const std::string table = fluence_table_csv(recipes);
  CHECK(table.find("fluence_cm2") != std::string::npos);
  CHECK(table.find("P6") != std::string::npos);

  // malformed rows cite their position
  const std::string bad =
      "name,current_nA,dwell_us,passes,overlap,diameter_nm,diameter_sigma_nm\n"
      "P1,abc,1,10,0.5,38,2\n";
  try {
    read_recipes_csv(bad);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(read_recipes_csv("name,current_nA\nP1\n"), InputError);
}
