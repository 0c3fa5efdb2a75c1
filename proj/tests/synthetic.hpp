#pragma once

// Synthetic-spectrum builders shared by the spectral tests and the
// acceptance suite.

#include <cmath>
#include <vector>

#include "peakfit.hpp"
#include "rng.hpp"
#include "spectrum.hpp"

namespace synth {

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
  return x;
}

struct Peak {
  double center, fwhm, height;
};

inline recoil::Spectrum spectrum_of(
    recoil::AxisKind kind, std::vector<double> axis,
    const std::vector<Peak>& peaks, const std::vector<double>& bg_coeffs = {},
    double bg_center = 0.0) {
  recoil::Spectrum s;
  s.kind = kind;
  s.axis = std::move(axis);
  s.intensity.resize(s.axis.size(), 0.0);
  for (size_t i = 0; i < s.axis.size(); ++i) {
    double v = 0.0;
    double pw = 1.0;
    for (double c : bg_coeffs) {
      v += c * pw;
      pw *= (s.axis[i] - bg_center);
    }
    for (const auto& p : peaks)
      v += recoil::lorentzian(s.axis[i], p.center, p.fwhm, p.height);
    s.intensity[i] = v;
  }
  return s;
}

// Gaussian noise via Box-Muller on the deterministic stream.
inline void add_noise(recoil::Spectrum& s, double sigma, recoil::RngStream& rng) {
  for (auto& v : s.intensity) {
    const double u1 = std::max(rng.uniform(), 1e-12);
    const double u2 = rng.uniform();
    v += sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
}

}  // namespace synth
