#pragma once

#include <array>
#include <vector>

#include "kinematics.hpp"
#include "peakfit.hpp"
#include "spectrum.hpp"

namespace recoil {

constexpr double kNvZfsGHz = 2.870;          // zero-field splitting D
constexpr double kNvGyromagneticMHzPerG = 2.803;

// First-order resonance frequencies [MHz] of the NV ground-state spin for a
// DC field B [G]: each of the four <111> orientations contributes the pair
// D +- gamma |B . u|. Valid for |B| small enough that the Zeeman term stays
// linear (|B| up to ~100 G). Returned sorted ascending.
std::array<double, 8> predict_odmr(const Vec3& field_gauss,
                                   double d_ghz = kNvZfsGHz,
                                   double gamma_mhz_per_g = kNvGyromagneticMHzPerG);

struct OdmrDip {
  double center_mhz = 0.0;
  double fwhm_mhz = 0.0;
  double contrast = 0.0;  // dip depth / baseline, in [0, 1)
  double center_sigma_mhz = 0.0;
  double fwhm_sigma_mhz = 0.0;
  double contrast_sigma = 0.0;
};

struct OdmrFit {
  std::vector<OdmrDip> dips;          // sorted by center
  std::array<double, 4> pair_midpoints_mhz{};  // i-th lowest with i-th highest
  double baseline = 1.0;
  double zfs_mean_ghz = 0.0;
  double zfs_std_ghz = 0.0;
  double residual_norm = 0.0;
  bool converged = false;
};

// Fits n_dips inverted Lorentzians on a constant baseline to a spectrum
// normalized to an off-resonance level of ~1. Throws ResolveError (with the
// resolved count) when fewer dips are distinguishable.
OdmrFit fit_odmr(const Spectrum& s, int n_dips = 8, const FitOptions& = {});

}  // namespace recoil
