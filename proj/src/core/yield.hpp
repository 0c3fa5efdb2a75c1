#pragma once

#include <map>
#include <string>

#include "fib_dose.hpp"
#include "transport.hpp"

namespace recoil {

// Film-species atoms stopped in the substrate, per incident ion. Bins whose
// center lies above substrate_start + exclusion_nm are summed; the optional
// exclusion skips the near-surface region where stopped atoms are unlikely
// to form stable centers.
struct PerIonCount {
  double value = 0.0;
  double sigma = 0.0;  // statistical, from the per-history moments
};
std::map<std::string, PerIonCount> per_ion_counts(const DepthProfileSet& profiles,
                                                  double exclusion_nm = 0.0);

struct EffectiveDose {
  std::map<std::string, PerIonCount> per_ion;
  FluenceEstimate fluence;
  std::map<std::string, double> areal_cm2;
  std::map<std::string, double> areal_sigma_cm2;
};

EffectiveDose effective_dose(const std::map<std::string, PerIonCount>& per_ion,
                             const FluenceEstimate& fluence);

// Areal emitter density from a PL contribution normalized to a single-emitter
// reference intensity inside a known excitation-spot area.
double emitter_density(double pl_contribution, double reference_single_intensity,
                       double spot_area_cm2);

struct YieldValue {
  double value = 0.0;
  double sigma = 0.0;
};

// density / areal dose of the species feeding the defect family.
YieldValue formation_yield(double density_cm2, double density_sigma_cm2,
                           const EffectiveDose& dose, const std::string& species);

// One defect family line of the report.
struct FamilyYield {
  std::string family;          // "NV", "SiV"
  std::string species;         // dose denominator species ("N", "Si")
  double pl_contribution = 0.0;
  double pl_sigma = 0.0;
  double reference_intensity = 0.0;
  double emitter_count = 0.0;
  double spot_area_cm2 = 0.0;
  double density_cm2 = 0.0;
  double density_sigma_cm2 = 0.0;
  YieldValue yield;
};

struct YieldReport {
  std::vector<FamilyYield> families;
  EffectiveDose dose;
  // Known bias, acknowledged but not corrected: near-surface emitters have a
  // different collection efficiency than the deep reference emitters.
  bool collection_efficiency_uncorrected = true;

  std::string to_json(const std::string& manifest_name = "") const;
};

struct YieldConfig {
  std::map<std::string, double> reference_intensity;  // family -> counts/s
  std::map<std::string, std::string> family_species;  // family -> species
  double spot_area_cm2 = 0.0;
  double exclusion_nm = 0.0;

  static YieldConfig from_json(const std::string& text);
};

// Full chain: profiles + fluence + per-family PL contributions -> report.
YieldReport yield_report(const DepthProfileSet& profiles,
                         const FluenceEstimate& fluence,
                         const std::map<std::string, double>& pl_contribution,
                         const std::map<std::string, double>& pl_sigma,
                         const YieldConfig& config);

}  // namespace recoil
