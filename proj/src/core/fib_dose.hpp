#pragma once

#include <string>
#include <vector>

namespace recoil {

// Raster parameters for one FIB exposure recipe. Beam diameters are inputs
// with an uncertainty; they come from a current->diameter calibration.
struct BeamRecipe {
  std::string name;
  double current_na = 0.0;
  double dwell_us = 0.0;
  int passes = 1;
  double overlap_fraction = 0.5;
  double beam_diameter_nm = 0.0;
  double beam_diameter_sigma_nm = 0.0;
  double charge_state = 1.0;  // elementary charges per ion

  void validate() const;  // throws InputError
};

struct FluenceEstimate {
  double value_cm2 = 0.0;
  double sigma_cm2 = 0.0;  // 1-sigma, from the beam-diameter uncertainty
  double ions_per_dwell = 0.0;
  // Set when the overlap correction used the general-geometry formula
  // instead of the calibrated 50% point.
  bool extrapolated_overlap = false;
};

// Ions delivered during one dwell: I*t / (q*e).
double ions_per_dwell(double current_na, double dwell_us, double charge_state = 1.0);

// Raster-overlap dose multiplier. The 50% point is calibrated to 3; other
// fractions use the 1/(1-f)^2 spot-coverage estimate and are flagged as an
// extrapolation in the result.
double overlap_factor(double overlap_fraction);

// Areal fluence = overlap_factor * passes * ions_per_dwell / spot_area,
// with sigma_F/F = 2 sigma_d/d (first order in the diameter uncertainty).
FluenceEstimate fluence(const BeamRecipe& recipe);

// Recipe-table CSV: name,current_nA,dwell_us,passes,overlap,diameter_nm,
// diameter_sigma_nm (comment lines start with '#').
std::vector<BeamRecipe> read_recipes_csv(const std::string& csv_text);

// Emits name,...,ions_per_dwell,fluence_cm2,fluence_sigma_cm2 rows.
std::string fluence_table_csv(const std::vector<BeamRecipe>& recipes,
                              const std::string& manifest_name = "");

}  // namespace recoil
