#include "kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "scatter.hpp"

namespace recoil {

double transfer_fraction_max(double m1_amu, double m2_amu) {
  const double s = m1_amu + m2_amu;
  return 4.0 * m1_amu * m2_amu / (s * s);
}

CollisionResult collision_kinematics(double energy_ev, double m1_amu,
                                     double m2_amu, double sin2_half_cm) {
  if (!(energy_ev > 0.0))
    throw InputError("collision: projectile energy must be positive");
  CollisionResult r;
  const double gamma = transfer_fraction_max(m1_amu, m2_amu);
  r.energy_transfer_ev = gamma * energy_ev * sin2_half_cm;
  r.projectile_energy_ev = energy_ev - r.energy_transfer_ev;

  const double cos_cm = 1.0 - 2.0 * sin2_half_cm;
  const double sin_cm = 2.0 * std::sqrt(std::max(0.0, sin2_half_cm * (1.0 - sin2_half_cm)));
  const double a = m1_amu / m2_amu;
  const double den2 = 1.0 + 2.0 * a * cos_cm + a * a;
  if (den2 > 1e-300) {
    const double inv = 1.0 / std::sqrt(den2);
    r.cos_lab = (cos_cm + a) * inv;
    r.sin_lab = sin_cm * inv;
  } else {
    // equal masses, head-on: projectile stops; direction is irrelevant
    r.cos_lab = 1.0;
    r.sin_lab = 0.0;
  }
  // Recoil goes at (pi - theta_cm)/2 from the incident direction.
  r.cos_recoil = std::sqrt(sin2_half_cm);
  r.sin_recoil = std::sqrt(1.0 - sin2_half_cm);
  return r;
}

CollisionResult binary_collision(int z1, double m1_amu, double energy_ev,
                                 int z2, double m2_amu,
                                 double impact_parameter_nm) {
  if (impact_parameter_nm < 0.0)
    throw InputError("collision: impact parameter must be >= 0");
  const double eps = reduced_energy(z1, m1_amu, z2, m2_amu, energy_ev);
  const double b = impact_parameter_nm / screening_length_nm(z1, z2);
  return collision_kinematics(energy_ev, m1_amu, m2_amu,
                              scatter_sin2_half(eps, b));
}

Vec3 rotate_direction(const Vec3& dir, double cos_p, double sin_p,
                      double cos_a, double sin_a) {
  // Local frame: e1 perpendicular to dir in the plane of the smaller axis.
  Vec3 e1;
  if (std::abs(dir.z) < 0.999) {
    // e1 = normalize(dir x z_hat)
    const double nx = dir.y, ny = -dir.x;
    const double inv = 1.0 / std::sqrt(nx * nx + ny * ny);
    e1 = {nx * inv, ny * inv, 0.0};
  } else {
    // near the pole, use x_hat to build the frame
    const double ny = dir.z, nz = -dir.y;
    const double inv = 1.0 / std::sqrt(ny * ny + nz * nz);
    e1 = {0.0, ny * inv, nz * inv};
  }
  // e2 = dir x e1
  const Vec3 e2 = {dir.y * e1.z - dir.z * e1.y, dir.z * e1.x - dir.x * e1.z,
                   dir.x * e1.y - dir.y * e1.x};
  Vec3 out = {dir.x * cos_p + sin_p * (e1.x * cos_a + e2.x * sin_a),
              dir.y * cos_p + sin_p * (e1.y * cos_a + e2.y * sin_a),
              dir.z * cos_p + sin_p * (e1.z * cos_a + e2.z * sin_a)};
  const double inv = 1.0 / std::sqrt(out.x * out.x + out.y * out.y + out.z * out.z);
  out.x *= inv;
  out.y *= inv;
  out.z *= inv;
  return out;
}

}  // namespace recoil
