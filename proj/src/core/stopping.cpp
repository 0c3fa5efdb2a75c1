#include "stopping.hpp"

#include <cmath>

#include "units.hpp"

namespace recoil {

namespace {

// Energy-independent part of the LS cross section [eV nm^2 per sqrt(eV/amu)].
double ls_prefactor(int z1, double m1_amu, int z2) {
  const double z1d = static_cast<double>(z1);
  const double z2d = static_cast<double>(z2);
  const double xi = std::pow(z1d, 1.0 / 6.0);
  const double zsum = std::pow(std::cbrt(z1d) * std::cbrt(z1d) +
                                   std::cbrt(z2d) * std::cbrt(z2d),
                               1.5);
  const double geom = 8.0 * M_PI * kCoulombEvNm * kBohrRadiusNm;
  return xi * geom * z1d * z2d / zsum /
         std::sqrt(kBohrVelocityEvPerAmu * m1_amu);
}

}  // namespace

double ls_cross_section(int z1, double m1_amu, int z2, double energy_ev) {
  if (energy_ev <= 0.0) return 0.0;
  return ls_prefactor(z1, m1_amu, z2) * std::sqrt(energy_ev);
}

double ls_material_coefficient(const ElementSpec& projectile,
                               const Material& material) {
  double k = 0.0;
  for (const auto& c : material.components)
    k += c.number_density *
         ls_prefactor(projectile.z, projectile.mass_amu, c.element.z);
  return k;
}

double electronic_stopping(const ElementSpec& projectile, double energy_ev,
                           const Material& material) {
  if (energy_ev <= 0.0) return 0.0;
  double dedx = 0.0;
  for (const auto& c : material.components)
    dedx += c.number_density *
            ls_cross_section(projectile.z, projectile.mass_amu, c.element.z,
                             energy_ev);
  return dedx;
}

}  // namespace recoil
