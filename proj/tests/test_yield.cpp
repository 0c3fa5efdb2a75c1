#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "test_configs.hpp"
#include "yield.hpp"

using namespace recoil;

namespace {

// Small but real profile set shared by the yield tests.
const DepthProfileSet& profiles() {
  static const DepthProfileSet p = run_simulation(
      SimConfig::from_json(sio2_config(30000.0, 4000, 77)), 1);
  return p;
}

FluenceEstimate fl(double v, double s) {
  FluenceEstimate f;
  f.value_cm2 = v;
  f.sigma_cm2 = s;
  return f;
}

}  // namespace

TEST_CASE("per-ion counts respect the exclusion depth") {
  const auto base = per_ion_counts(profiles(), 0.0);
  CHECK(base.at("Si").value > 0.5);
  CHECK(base.at("Si").sigma > 0.0);
  // monotone non-increasing in the exclusion depth
  double prev = base.at("Si").value;
  for (double ex : {1.0, 2.0, 5.0, 10.0, 50.0}) {
    const double v = per_ion_counts(profiles(), ex).at("Si").value;
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  // exclusion beyond the whole profile
  CHECK(per_ion_counts(profiles(), 1000.0).at("Si").value == 0.0);
  CHECK_THROWS_AS(per_ion_counts(profiles(), -1.0), InputError);
}

TEST_CASE("effective dose is the elementwise product with the fluence") {
  std::map<std::string, PerIonCount> per_ion;
  per_ion["Si"] = {1.83, 0.01};
  per_ion["N"] = {2.19, 0.01};
  const EffectiveDose d = effective_dose(per_ion, fl(1.30e16, 0.14e16));
  CHECK(d.areal_cm2.at("Si") == doctest::Approx(2.38e16).epsilon(1e-3));
  const EffectiveDose dn = effective_dose(per_ion, fl(2.87e14, 0.36e14));
  CHECK(dn.areal_cm2.at("N") == doctest::Approx(6.29e14).epsilon(1e-3));
  // zero fluence -> zero dose
  const EffectiveDose z = effective_dose(per_ion, fl(0.0, 0.0));
  CHECK(z.areal_cm2.at("Si") == 0.0);
  // quadrature of relative uncertainties
  const double rel = d.areal_sigma_cm2.at("Si") / d.areal_cm2.at("Si");
  const double want = std::sqrt(std::pow(0.14 / 1.30, 2) +
                                std::pow(0.01 / 1.83, 2));
  CHECK(rel == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("emitter density unit conversion") {
  // one reference unit inside a 1 um^2 spot
  CHECK(emitter_density(1.0, 1.0, 1e-8) == doctest::Approx(1e8).epsilon(1e-12));
  CHECK(emitter_density(1.0, 1.0, 2e-8) ==
        doctest::Approx(0.5e8).epsilon(1e-12));
  CHECK_THROWS_AS(emitter_density(1.0, 0.0, 1e-8), InputError);
  CHECK_THROWS_AS(emitter_density(1.0, 1.0, 0.0), InputError);
}

TEST_CASE("formation yield arithmetic") {
  std::map<std::string, PerIonCount> per_ion;
  per_ion["Si"] = {1.83, 0.0};
  const EffectiveDose d = effective_dose(per_ion, fl(1.30e16, 0.0));
  const YieldValue y = formation_yield(2.4e11, 0.0, d, "Si");
  CHECK(y.value == doctest::Approx(1.0e-5).epsilon(1e-2));
  CHECK(formation_yield(0.0, 0.0, d, "Si").value == 0.0);
  // ten times the dose -> one tenth the yield
  const EffectiveDose d10 = effective_dose(per_ion, fl(1.30e17, 0.0));
  CHECK(formation_yield(2.4e11, 0.0, d10, "Si").value ==
        doctest::Approx(y.value / 10.0).epsilon(1e-12));
  CHECK_THROWS_AS(formation_yield(1.0, 0.0, d, "N"), InputError);
}

TEST_CASE("end-to-end report matches an independent arithmetic oracle") {
  YieldConfig cfg;
  cfg.reference_intensity = {{"NV", 2000.0}, {"SiV", 5000.0}};
  cfg.family_species = {{"NV", "O"}, {"SiV", "Si"}};  // O stands in for N here
  cfg.spot_area_cm2 = 1.2e-8;
  cfg.exclusion_nm = 0.0;

  const std::map<std::string, double> pl = {{"NV", 8.4e4}, {"SiV", 3.1e5}};
  const std::map<std::string, double> pls = {{"NV", 0.0}, {"SiV", 0.0}};
  const FluenceEstimate f = fl(5.19e14, 0.50e14);
  const YieldReport rep = yield_report(profiles(), f, pl, pls, cfg);

  // spreadsheet-style recomputation from the same raw inputs
  const auto counts = per_ion_counts(profiles(), 0.0);
  for (const auto& fam : rep.families) {
    const double density =
        (pl.at(fam.family) / cfg.reference_intensity.at(fam.family)) /
        cfg.spot_area_cm2;
    const double dose = counts.at(fam.species).value * f.value_cm2;
    CHECK(fam.density_cm2 == doctest::Approx(density).epsilon(1e-12));
    CHECK(fam.yield.value == doctest::Approx(density / dose).epsilon(1e-12));
  }
  CHECK(rep.collection_efficiency_uncorrected);

  const std::string json_text = rep.to_json("manifest.json");
  CHECK(json_text.find("yield_report") != std::string::npos);
  CHECK(json_text.find("manifest.json") != std::string::npos);
}

TEST_CASE("yield config parsing") {
  const YieldConfig cfg = YieldConfig::from_json(R"({
    "reference_intensity": {"NV": 2000.0, "SiV": 5000.0},
    "family_species": {"NV": "N", "SiV": "Si"},
    "spot_area_cm2": 1.2e-8,
    "exclusion_nm": 0.5
  })");
  CHECK(cfg.family_species.at("NV") == "N");
  CHECK(cfg.exclusion_nm == 0.5);
  CHECK_THROWS_AS(YieldConfig::from_json("{}"), ConfigError);
  CHECK_THROWS_AS(YieldConfig::from_json("{bad"), ConfigError);
}
