#pragma once

#include <vector>

namespace recoil {

// ZBL universal screening function, x = r/a_U.
double zbl_screening(double x);

// ZBL universal screening length [nm].
double screening_length_nm(int z1, int z2);

// Reduced energy for a lab-frame projectile energy [eV].
double reduced_energy(int z1, double m1, int z2, double m2, double energy_ev);

// Center-of-mass deflection angle [rad] for the screened-Coulomb collision
// at reduced energy eps and reduced impact parameter b. Evaluated by a
// fixed-order Gauss-Mehler quadrature of the classical scattering integral
// after root-finding the distance of closest approach. Strictly decreasing
// in b; theta(eps, 0) = pi.
double scatter_theta_cm(double eps, double b);

// sin^2(theta_cm/2) via the same quadrature (the quantity the kinematics
// actually consumes; avoids cancellation for tiny angles when needed).
double scatter_sin2_half(double eps, double b);

// Reduced distance of closest approach (root of the radial turning-point
// equation). Exposed for the quadrature oracle in the tests.
double closest_approach(double eps, double b);

// Precomputed sin^2(theta/2) lookup over a (eps, b) grid, shared by all
// projectile/target pairs through the reduced-unit mapping. Grid is
// geometric in eps (indexable straight from the double's exponent bits,
// no log in the hot path) and uniform in sqrt(b).
class ScatterTable {
 public:
  static const ScatterTable& instance();  // built once, thread-safe

  double sin2_half(double eps, double b) const;

  // Grid description, used by accuracy tests.
  double eps_min() const;
  double eps_max() const;
  double b_max() const;

 private:
  ScatterTable();
  static constexpr int kExpLo = -24;       // eps from 2^-24
  static constexpr int kExpHi = 8;         // ... to 2^8
  static constexpr int kPerOctave = 16;    // mantissa subdivisions
  static constexpr int kNb = 512;          // sqrt(b) grid points
  static constexpr double kBMax = 16.0;

  int neps_ = 0;
  double sqrtb_step_ = 0.0;
  std::vector<double> table_;  // [ieps * (kNb+1) + ib]

  double eps_at(int i) const;
};

}  // namespace recoil
