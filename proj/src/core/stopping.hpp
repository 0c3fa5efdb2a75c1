#pragma once

#include "element.hpp"
#include "material.hpp"

namespace recoil {

// Lindhard-Scharff electronic stopping cross section per target atom
// [eV nm^2], velocity-proportional: S = xi_e * 8 pi e^2 a0 * Z1 Z2 /
// (Z1^2/3 + Z2^2/3)^3/2 * v/v0 with xi_e = Z1^(1/6).
double ls_cross_section(int z1, double m1_amu, int z2, double energy_ev);

// dE/dx [eV/nm] in a compound via Bragg additivity over the species
// number densities.
double electronic_stopping(const ElementSpec& projectile, double energy_ev,
                           const Material& material);

// Coefficient k such that dE/dx = k * sqrt(E[eV]); the engine caches this
// per (projectile, material) pair.
double ls_material_coefficient(const ElementSpec& projectile,
                               const Material& material);

}  // namespace recoil
