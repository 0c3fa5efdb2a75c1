#pragma once

#include <string>
#include <utility>
#include <vector>

#include "element.hpp"

namespace recoil {

// A homogeneous amorphous material: stoichiometry plus mass density,
// with per-species number densities derived once at construction.
struct Material {
  struct Component {
    ElementSpec element;
    double fraction = 0.0;            // normalized stoichiometric fraction
    double number_density = 0.0;      // atoms/nm^3
  };

  std::string name;
  double mass_density_g_cm3 = 0.0;
  std::vector<Component> components;
  double total_number_density = 0.0;  // atoms/nm^3
  double molar_mass = 0.0;            // g/mol per (fraction-weighted) atom

  // Round-trip: fraction-weighted molar mass times total density reproduces
  // the input mass density.
  double mass_density_roundtrip_g_cm3() const;
};

// Stoichiometry as (symbol, count) pairs, e.g. SiO2 -> {("Si",1),("O",2)}.
using Formula = std::vector<std::pair<std::string, double>>;

// Parses "SiO2", "Si3N4", "SiN1.33", ... Counts may be decimal.
Formula parse_formula(const std::string& text);

Material material_from_formula(const std::string& name, const Formula& formula,
                               double density_g_cm3,
                               const ElementTable& elements);

}  // namespace recoil
