#pragma once

#include <map>
#include <string>

#include "spectrum.hpp"

namespace recoil {

// Non-negative decomposition of a PL spectrum into scaled model spectra
// plus a free quadratic background over the detection band.
struct UnmixInput {
  Spectrum spectrum;
  std::map<std::string, Spectrum> models;  // component name -> model spectrum
  double band_lo_nm = 625.0;
  double band_hi_nm = 792.0;
};

struct UnmixResult {
  std::map<std::string, double> weights;        // model scales, >= 0
  std::vector<double> background;               // quadratic coefficients
  double background_center = 0.0;
  std::map<std::string, double> contributions;  // band-integrated model PL
  double background_integral = 0.0;
  double total_fit_integral = 0.0;
  double residual_norm = 0.0;
  double condition_number = 0.0;
  bool ill_conditioned = false;
  // NV contribution reported including the background integral (the
  // background mostly carries the NV0 phonon sideband).
  double nv_with_background = 0.0;
};

// Exact active-set solve: the model scales are constrained >= 0, the
// background coefficients are free.
UnmixResult unmix(const UnmixInput& input);

}  // namespace recoil
