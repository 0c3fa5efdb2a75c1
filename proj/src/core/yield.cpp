#include "yield.hpp"

#include <cmath>

#include <json.hpp>

#include "errors.hpp"

namespace recoil {

using nlohmann::json;

std::map<std::string, PerIonCount> per_ion_counts(const DepthProfileSet& profiles,
                                                  double exclusion_nm) {
  if (exclusion_nm < 0.0)
    throw InputError("per_ion_counts: exclusion depth must be >= 0");
  const double region_start = profiles.substrate_start_nm + exclusion_nm;
  if (profiles.substrate_start_nm >= profiles.max_depth_nm)
    throw InputError("per_ion_counts: profiles do not cover the substrate");

  std::map<std::string, PerIonCount> out;
  const double n = static_cast<double>(profiles.ion_count);
  for (size_t s = 0; s < profiles.species.size(); ++s) {
    uint64_t total = 0;
    for (int b = 0; b < profiles.bin_count; ++b)
      if (profiles.bin_center(b) >= region_start) total += profiles.stopped[s][b];
    PerIonCount c;
    c.value = static_cast<double>(total) / n;
    if (exclusion_nm == 0.0) {
      // exact per-history moments are tracked for the plain substrate region
      c.sigma = profiles.substrate_per_ion_sigma(static_cast<int>(s));
    } else {
      // Poisson-style bound for the truncated region
      c.sigma = total > 0 ? std::sqrt(static_cast<double>(total)) / n : 0.0;
    }
    out[profiles.species[s]] = c;
  }
  return out;
}

EffectiveDose effective_dose(const std::map<std::string, PerIonCount>& per_ion,
                             const FluenceEstimate& fluence) {
  EffectiveDose dose;
  dose.per_ion = per_ion;
  dose.fluence = fluence;
  const double rel_f =
      fluence.value_cm2 > 0.0 ? fluence.sigma_cm2 / fluence.value_cm2 : 0.0;
  for (const auto& [species, count] : per_ion) {
    const double areal = count.value * fluence.value_cm2;
    dose.areal_cm2[species] = areal;
    const double rel_c = count.value > 0.0 ? count.sigma / count.value : 0.0;
    dose.areal_sigma_cm2[species] =
        areal * std::sqrt(rel_f * rel_f + rel_c * rel_c);
  }
  return dose;
}

double emitter_density(double pl_contribution, double reference_single_intensity,
                       double spot_area_cm2) {
  if (!(reference_single_intensity > 0.0))
    throw InputError("emitter_density: reference intensity must be positive");
  if (!(spot_area_cm2 > 0.0))
    throw InputError("emitter_density: spot area must be positive");
  return (pl_contribution / reference_single_intensity) / spot_area_cm2;
}

YieldValue formation_yield(double density_cm2, double density_sigma_cm2,
                           const EffectiveDose& dose,
                           const std::string& species) {
  auto it = dose.areal_cm2.find(species);
  if (it == dose.areal_cm2.end() || !(it->second > 0.0))
    throw InputError("formation_yield: zero areal dose for species " + species);
  YieldValue y;
  y.value = density_cm2 / it->second;
  const double rel_den =
      density_cm2 > 0.0 ? density_sigma_cm2 / density_cm2 : 0.0;
  const double rel_dose = dose.areal_sigma_cm2.at(species) / it->second;
  y.sigma = y.value * std::sqrt(rel_den * rel_den + rel_dose * rel_dose);
  return y;
}

YieldConfig YieldConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("yield config: ") + e.what());
  }
  YieldConfig cfg;
  try {
    for (auto it = j.at("reference_intensity").begin();
         it != j.at("reference_intensity").end(); ++it)
      cfg.reference_intensity[it.key()] = it.value().get<double>();
    for (auto it = j.at("family_species").begin();
         it != j.at("family_species").end(); ++it)
      cfg.family_species[it.key()] = it.value().get<std::string>();
    cfg.spot_area_cm2 = j.at("spot_area_cm2").get<double>();
    cfg.exclusion_nm = j.value("exclusion_nm", 0.0);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("yield config: ") + e.what());
  }
  if (!(cfg.spot_area_cm2 > 0.0))
    throw ConfigError("yield config: spot_area_cm2 must be positive");
  return cfg;
}

YieldReport yield_report(const DepthProfileSet& profiles,
                         const FluenceEstimate& fluence,
                         const std::map<std::string, double>& pl_contribution,
                         const std::map<std::string, double>& pl_sigma,
                         const YieldConfig& config) {
  YieldReport report;
  report.dose = effective_dose(per_ion_counts(profiles, config.exclusion_nm),
                               fluence);
  for (const auto& [family, pl] : pl_contribution) {
    auto sp = config.family_species.find(family);
    if (sp == config.family_species.end())
      throw ConfigError("yield config: no species mapping for family " + family);
    auto ref = config.reference_intensity.find(family);
    if (ref == config.reference_intensity.end())
      throw ConfigError("yield config: no reference intensity for family " +
                        family);
    FamilyYield fy;
    fy.family = family;
    fy.species = sp->second;
    fy.pl_contribution = pl;
    fy.pl_sigma = pl_sigma.count(family) ? pl_sigma.at(family) : 0.0;
    fy.reference_intensity = ref->second;
    fy.spot_area_cm2 = config.spot_area_cm2;
    fy.emitter_count = pl / ref->second;
    fy.density_cm2 = emitter_density(pl, ref->second, config.spot_area_cm2);
    fy.density_sigma_cm2 =
        pl > 0.0 ? fy.density_cm2 * fy.pl_sigma / pl : 0.0;
    fy.yield = formation_yield(fy.density_cm2, fy.density_sigma_cm2,
                               report.dose, fy.species);
    report.families.push_back(std::move(fy));
  }
  return report;
}

std::string YieldReport::to_json(const std::string& manifest_name) const {
  json j;
  j["kind"] = "yield_report";
  if (!manifest_name.empty()) j["manifest"] = manifest_name;
  j["collection_efficiency_uncorrected"] = collection_efficiency_uncorrected;
  j["fluence_cm2"] = dose.fluence.value_cm2;
  j["fluence_sigma_cm2"] = dose.fluence.sigma_cm2;
  for (const auto& [species, count] : dose.per_ion) {
    j["per_ion"][species] = {{"value", count.value}, {"sigma", count.sigma}};
    j["areal_dose_cm2"][species] = dose.areal_cm2.at(species);
    j["areal_dose_sigma_cm2"][species] = dose.areal_sigma_cm2.at(species);
  }
  for (const auto& f : families) {
    json e;
    e["species"] = f.species;
    e["pl_contribution"] = f.pl_contribution;
    e["pl_sigma"] = f.pl_sigma;
    e["reference_intensity"] = f.reference_intensity;
    e["emitter_count"] = f.emitter_count;
    e["spot_area_cm2"] = f.spot_area_cm2;
    e["density_cm2"] = f.density_cm2;
    e["density_sigma_cm2"] = f.density_sigma_cm2;
    e["yield"] = f.yield.value;
    e["yield_sigma"] = f.yield.sigma;
    j["families"][f.family] = e;
  }
  return j.dump(2) + "\n";
}

}  // namespace recoil
