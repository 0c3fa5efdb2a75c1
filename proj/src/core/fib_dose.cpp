#include "fib_dose.hpp"
#include <cstdio>

#include <cmath>

#include "csv.hpp"
#include "errors.hpp"
#include "units.hpp"

namespace recoil {

void BeamRecipe::validate() const {
  if (current_na < 0.0) throw InputError("recipe " + name + ": negative current");
  if (!(dwell_us > 0.0)) throw InputError("recipe " + name + ": dwell must be positive");
  if (passes < 1) throw InputError("recipe " + name + ": passes must be >= 1");
  if (overlap_fraction < 0.0 || overlap_fraction >= 1.0)
    throw InputError("recipe " + name + ": overlap must be in [0, 1)");
  if (!(beam_diameter_nm > 0.0))
    throw InputError("recipe " + name + ": beam diameter must be positive");
  if (beam_diameter_sigma_nm < 0.0)
    throw InputError("recipe " + name + ": negative diameter sigma");
  if (!(charge_state > 0.0))
    throw InputError("recipe " + name + ": charge state must be positive");
}

double ions_per_dwell(double current_na, double dwell_us, double charge_state) {
  if (current_na < 0.0 || dwell_us < 0.0 || charge_state <= 0.0)
    throw InputError("ions_per_dwell: invalid inputs");
  return current_na * 1e-9 * dwell_us * 1e-6 /
         (charge_state * kElementaryChargeC);
}

double overlap_factor(double overlap_fraction) {
  if (overlap_fraction == 0.5) return 3.0;  // calibrated raster point
  const double step = 1.0 - overlap_fraction;
  return 1.0 / (step * step);
}

FluenceEstimate fluence(const BeamRecipe& recipe) {
  recipe.validate();
  FluenceEstimate est;
  est.ions_per_dwell =
      ions_per_dwell(recipe.current_na, recipe.dwell_us, recipe.charge_state);
  const double d_cm = recipe.beam_diameter_nm * 1e-7;
  const double spot_area_cm2 = M_PI * d_cm * d_cm / 4.0;
  est.extrapolated_overlap = recipe.overlap_fraction != 0.5;
  est.value_cm2 = overlap_factor(recipe.overlap_fraction) * recipe.passes *
                  est.ions_per_dwell / spot_area_cm2;
  // F ~ d^-2, so sigma_F/F = 2 sigma_d/d to first order.
  est.sigma_cm2 = est.value_cm2 * 2.0 * recipe.beam_diameter_sigma_nm /
                  recipe.beam_diameter_nm;
  return est;
}

std::vector<BeamRecipe> read_recipes_csv(const std::string& csv_text) {
  const CsvTable t = parse_csv(csv_text);
  const int c_name = t.column("name");
  const int c_cur = t.column("current_nA");
  const int c_dwell = t.column("dwell_us");
  const int c_pass = t.column("passes");
  const int c_ov = t.column("overlap");
  const int c_d = t.column("diameter_nm");
  const int c_ds = t.column("diameter_sigma_nm");
  std::vector<BeamRecipe> out;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    BeamRecipe rec;
    rec.name = t.rows[r][c_name];
    rec.current_na = csv_to_double(t, r, c_cur);
    rec.dwell_us = csv_to_double(t, r, c_dwell);
    rec.passes = static_cast<int>(csv_to_long(t, r, c_pass));
    rec.overlap_fraction = csv_to_double(t, r, c_ov);
    rec.beam_diameter_nm = csv_to_double(t, r, c_d);
    rec.beam_diameter_sigma_nm = csv_to_double(t, r, c_ds);
    rec.validate();
    out.push_back(std::move(rec));
  }
  return out;
}

std::string fluence_table_csv(const std::vector<BeamRecipe>& recipes,
                              const std::string& manifest_name) {
  std::string out;
  if (!manifest_name.empty()) out += "# manifest: " + manifest_name + "\n";
  out +=
      "name,current_nA,dwell_us,passes,overlap,diameter_nm,diameter_sigma_nm,"
      "ions_per_dwell,fluence_cm2,fluence_sigma_cm2\n";
  char sci[32];
  for (const auto& r : recipes) {
    const FluenceEstimate est = fluence(r);
    out += r.name;
    out += ',' + format_compact(r.current_na);
    out += ',' + format_compact(r.dwell_us);
    out += ',' + std::to_string(r.passes);
    out += ',' + format_compact(r.overlap_fraction);
    out += ',' + format_compact(r.beam_diameter_nm);
    out += ',' + format_compact(r.beam_diameter_sigma_nm);
    std::snprintf(sci, sizeof sci, ",%.6e", est.ions_per_dwell);
    out += sci;
    std::snprintf(sci, sizeof sci, ",%.6e", est.value_cm2);
    out += sci;
    std::snprintf(sci, sizeof sci, ",%.6e", est.sigma_cm2);
    out += sci;
    out += '\n';
  }
  return out;
}

}  // namespace recoil
