#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "odmr.hpp"
#include "synthetic.hpp"

using namespace recoil;

namespace {

Spectrum odmr_spectrum(const std::array<double, 8>& dips_mhz, double fwhm_mhz,
                       double contrast, double noise, uint64_t seed) {
  Spectrum s;
  s.kind = AxisKind::FrequencyMHz;
  s.axis = synth::linspace(2740.0, 3000.0, 521);
  s.intensity.assign(s.axis.size(), 1.0);
  for (size_t i = 0; i < s.axis.size(); ++i)
    for (double c : dips_mhz)
      s.intensity[i] -= lorentzian(s.axis[i], c, fwhm_mhz, contrast);
  if (noise > 0.0) {
    RngStream rng(seed, 0);
    synth::add_noise(s, noise, rng);
  }
  return s;
}

}  // namespace

TEST_CASE("zero field collapses all eight resonances onto D") {
  const auto f = predict_odmr({0.0, 0.0, 0.0});
  for (double v : f) CHECK(v == doctest::Approx(2870.0).epsilon(1e-12));
}

TEST_CASE("24 G along [100]: one degenerate pair split by 77.7 MHz") {
  const auto f = predict_odmr({24.0, 0.0, 0.0});
  // every <111> axis sees |cos| = 1/sqrt(3): offset = 2.803*24/sqrt(3)
  const double offset = 2.803 * 24.0 / std::sqrt(3.0);
  CHECK(offset == doctest::Approx(38.8395).epsilon(1e-4));
  for (int i = 0; i < 4; ++i) {
    CHECK(f[i] == doctest::Approx(2870.0 - offset).epsilon(1e-9));
    CHECK(f[7 - i] == doctest::Approx(2870.0 + offset).epsilon(1e-9));
  }
}

TEST_CASE("24 G along [111]: aligned axis splits by 134.5 MHz, others 44.8") {
  const double n = 24.0 / std::sqrt(3.0);
  const auto f = predict_odmr({n, n, n});
  const double full = 2.0 * 2.803 * 24.0;       // aligned axis
  const double off = 2.0 * 2.803 * 24.0 / 3.0;  // |cos| = 1/3 axes
  CHECK(full == doctest::Approx(134.544).epsilon(1e-4));
  CHECK(off == doctest::Approx(44.848).epsilon(1e-4));
  CHECK(f[7] - f[0] == doctest::Approx(full).epsilon(1e-9));
  CHECK(f[6] - f[1] == doctest::Approx(off).epsilon(1e-9));
}

TEST_CASE("pair midpoints of the forward model all equal D") {
  const auto f = predict_odmr({9.0, 17.0, 13.0});
  for (int i = 0; i < 4; ++i)
    CHECK(0.5 * (f[i] + f[7 - i]) == doctest::Approx(2870.0).epsilon(1e-12));
}

TEST_CASE("round trip: fit recovers the forward model") {
  // non-degenerate direction with well-separated projections
  const Vec3 b{5.4, 10.8, 19.8};
  const auto dips = predict_odmr(b);
  const Spectrum s = odmr_spectrum(dips, 8.4, 0.03, 0.002, 31415);
  const OdmrFit fit = fit_odmr(s, 8);
  REQUIRE(fit.dips.size() == 8);
  CHECK(std::abs(fit.zfs_mean_ghz - 2.870) * 1e3 < 0.1);  // within 0.1 MHz
  for (int i = 0; i < 8; ++i) {
    CHECK(std::abs(fit.dips[i].center_mhz - dips[i]) <=
          3.0 * std::max(fit.dips[i].center_sigma_mhz, 0.02));
    CHECK(fit.dips[i].contrast == doctest::Approx(0.03).epsilon(0.25));
    CHECK(fit.dips[i].fwhm_mhz == doctest::Approx(8.4).epsilon(0.25));
  }
}

TEST_CASE("degenerate field direction reports the resolved count") {
  const auto dips = predict_odmr({24.0, 0.0, 0.0});  // two distinct dips
  const Spectrum s = odmr_spectrum(dips, 8.4, 0.03, 0.001, 7);
  try {
    fit_odmr(s, 8);
    FAIL("expected ResolveError");
  } catch (const ResolveError& e) {
    CHECK(e.resolved_count < 8);
    CHECK(e.resolved_count >= 2);
  }
}

TEST_CASE("contrast recovery over repeated noisy realizations") {
  const Vec3 b{5.4, 10.8, 19.8};
  const auto dips = predict_odmr(b);
  int covered = 0;
  const int trials = 25;
  for (int t = 0; t < trials; ++t) {
    const Spectrum s = odmr_spectrum(dips, 8.4, 0.03, 0.002, 1000 + t);
    const OdmrFit fit = fit_odmr(s, 8);
    bool all = true;
    for (const auto& d : fit.dips)
      if (std::abs(d.contrast - 0.03) > 3.0 * std::max(d.contrast_sigma, 1e-4))
        all = false;
    if (all) ++covered;
  }
  CHECK(covered >= trials * 85 / 100);
}

TEST_CASE("wavelength-axis spectra are rejected") {
  Spectrum s;
  s.kind = AxisKind::WavelengthNm;
  s.axis = synth::linspace(600.0, 700.0, 200);
  s.intensity.assign(200, 1.0);
  CHECK_THROWS_AS(fit_odmr(s, 8), InputError);
}
