#pragma once

#include <array>

#include "element.hpp"

namespace recoil {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

// Outcome of one elastic two-body collision, lab frame.
struct CollisionResult {
  double energy_transfer_ev = 0.0;   // T, recoil kinetic energy before binding
  double projectile_energy_ev = 0.0; // E - T, exact
  double cos_lab = 1.0;              // projectile deflection
  double sin_lab = 0.0;
  double cos_recoil = 0.0;           // recoil polar angle from incident dir
  double sin_recoil = 1.0;
};

// Maximum transfer fraction 4 m1 m2 / (m1 + m2)^2.
double transfer_fraction_max(double m1_amu, double m2_amu);

// CM->lab kinematics given sin^2(theta_cm/2). Energy closure is exact:
// projectile_energy = energy - energy_transfer.
CollisionResult collision_kinematics(double energy_ev, double m1_amu,
                                     double m2_amu, double sin2_half_cm);

// Full collision for the scatter [OP]: evaluates the scattering integral for
// the projectile/target pair at the given impact parameter [nm].
CollisionResult binary_collision(int z1, double m1_amu, double energy_ev,
                                 int z2, double m2_amu,
                                 double impact_parameter_nm);

// Rotates `dir` by polar angle (cos_p, sin_p) about itself with azimuth
// (cos_a, sin_a) in a deterministic local frame; returns a unit vector.
Vec3 rotate_direction(const Vec3& dir, double cos_p, double sin_p,
                      double cos_a, double sin_a);

}  // namespace recoil
