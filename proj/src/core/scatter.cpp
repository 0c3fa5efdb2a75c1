#include "scatter.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "errors.hpp"
#include "units.hpp"

namespace recoil {

double zbl_screening(double x) {
  return 0.18175 * std::exp(-3.19980 * x) + 0.50986 * std::exp(-0.94229 * x) +
         0.28022 * std::exp(-0.40290 * x) + 0.02817 * std::exp(-0.20162 * x);
}

static double zbl_screening_deriv(double x) {
  return -3.19980 * 0.18175 * std::exp(-3.19980 * x) -
         0.94229 * 0.50986 * std::exp(-0.94229 * x) -
         0.40290 * 0.28022 * std::exp(-0.40290 * x) -
         0.20162 * 0.02817 * std::exp(-0.20162 * x);
}

double screening_length_nm(int z1, int z2) {
  return 0.8854 * kBohrRadiusNm /
         (std::pow(static_cast<double>(z1), 0.23) +
          std::pow(static_cast<double>(z2), 0.23));
}

double reduced_energy(int z1, double m1, int z2, double m2, double energy_ev) {
  const double a = screening_length_nm(z1, z2);
  const double e_cm = energy_ev * m2 / (m1 + m2);
  return a * e_cm / (static_cast<double>(z1) * z2 * kCoulombEvNm);
}

// Radial turning-point equation F(x) = 1 - phi(x)/(x eps) - (b/x)^2.
// F is strictly increasing; the root is bracketed between ~0 (where the
// potential term blows up) and the unscreened-Coulomb turning point.
// Safeguarded Newton: steps leaving the bracket fall back to bisection.
double closest_approach(double eps, double b) {
  double lo = 1e-12;
  double hi = (1.0 + std::sqrt(1.0 + 4.0 * eps * eps * b * b)) / (2.0 * eps);
  double x = hi;
  for (int it = 0; it < 200; ++it) {
    const double phi = zbl_screening(x);
    const double f = 1.0 - phi / (x * eps) - (b * b) / (x * x);
    if (f < 0.0)
      lo = x;
    else
      hi = x;
    const double fp = (phi - x * zbl_screening_deriv(x)) / (eps * x * x) +
                      2.0 * b * b / (x * x * x);
    double xn = x - f / fp;
    if (!std::isfinite(xn) || xn <= lo || xn >= hi) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) < 1e-15 * xn) {
      x = xn;
      break;
    }
    x = xn;
  }
  return x;
}

namespace {

// Integrand factor g(x)^2 of the scattering integral.
inline double g_squared(double x, double eps, double b) {
  return 1.0 - zbl_screening(x) / (x * eps) - (b * b) / (x * x);
}

// Gauss-Mehler quadrature of I = int_{x0}^{inf} dx / (x^2 g(x)) after the
// substitution x = x0/u, which maps the endpoint singularity onto the
// Chebyshev weight.
constexpr int kQuadOrder = 64;

struct QuadNodes {
  double u[kQuadOrder];
  double one_minus_u2[kQuadOrder];
  QuadNodes() {
    for (int i = 0; i < kQuadOrder; ++i) {
      const double phi = M_PI * (2 * i + 1) / (4.0 * kQuadOrder);
      u[i] = std::cos(phi);
      one_minus_u2[i] = std::sin(phi) * std::sin(phi);
    }
  }
};

double reduced_integral(double eps, double b, double x0) {
  static const QuadNodes nodes;
  double sum = 0.0;
  for (int i = 0; i < kQuadOrder; ++i) {
    const double g2 = g_squared(x0 / nodes.u[i], eps, b);
    sum += std::sqrt(nodes.one_minus_u2[i] / std::max(g2, 1e-300));
  }
  return sum * M_PI / (2.0 * kQuadOrder * x0);
}

}  // namespace

double scatter_theta_cm(double eps, double b) {
  if (!std::isfinite(eps) || !std::isfinite(b) || eps <= 0.0 || b < 0.0)
    throw InputError("scatter: eps must be > 0 and b >= 0 and finite");
  if (b == 0.0) return M_PI;
  const double x0 = closest_approach(eps, b);
  const double theta = M_PI - 2.0 * b * reduced_integral(eps, b, x0);
  if (theta < 0.0) return 0.0;  // quadrature roundoff in the grazing limit
  return theta;
}

double scatter_sin2_half(double eps, double b) {
  const double s = std::sin(0.5 * scatter_theta_cm(eps, b));
  return s * s;
}

// ---- lookup table ----------------------------------------------------

const ScatterTable& ScatterTable::instance() {
  static const ScatterTable table;
  return table;
}

double ScatterTable::eps_at(int i) const {
  const int oct = i / kPerOctave;
  const int j = i % kPerOctave;
  return std::ldexp(1.0 + static_cast<double>(j) / kPerOctave, kExpLo + oct);
}

double ScatterTable::eps_min() const { return std::ldexp(1.0, kExpLo); }
double ScatterTable::eps_max() const { return std::ldexp(1.0, kExpHi); }
double ScatterTable::b_max() const { return kBMax; }

ScatterTable::ScatterTable() {
  neps_ = (kExpHi - kExpLo) * kPerOctave + 1;
  sqrtb_step_ = std::sqrt(kBMax) / kNb;
  table_.resize(static_cast<size_t>(neps_) * (kNb + 1));
  for (int ie = 0; ie < neps_; ++ie) {
    const double eps = eps_at(ie);
    for (int ib = 0; ib <= kNb; ++ib) {
      const double sb = ib * sqrtb_step_;
      table_[static_cast<size_t>(ie) * (kNb + 1) + ib] =
          scatter_sin2_half(eps, sb * sb);
    }
  }
}

double ScatterTable::sin2_half(double eps, double b) const {
  if (b >= kBMax) b = kBMax;  // grazing: transfer is negligible out here
  if (eps <= eps_min() || eps >= eps_max())
    return scatter_sin2_half(eps, b);  // rare: fall back to the quadrature

  // Fractional eps index straight from the floating-point representation:
  // grid points sit at 2^k (1 + j/16), so exponent bits give the octave and
  // the mantissa interpolates linearly within it.
  const uint64_t bits = std::bit_cast<uint64_t>(eps);
  const int expo = static_cast<int>((bits >> 52) & 0x7FF) - 1023;
  const double mant = std::bit_cast<double>(
      (bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);  // in [1,2)
  const double fe = (expo - kExpLo) * kPerOctave + (mant - 1.0) * kPerOctave;
  int ie = static_cast<int>(fe);
  if (ie >= neps_ - 1) ie = neps_ - 2;
  const double te = fe - ie;

  const double fb = std::sqrt(b) / sqrtb_step_;
  int ib = static_cast<int>(fb);
  if (ib >= kNb) ib = kNb - 1;
  const double tb = fb - ib;

  const double* row0 = &table_[static_cast<size_t>(ie) * (kNb + 1)];
  const double* row1 = row0 + (kNb + 1);
  const double v0 = row0[ib] + tb * (row0[ib + 1] - row0[ib]);
  const double v1 = row1[ib] + tb * (row1[ib + 1] - row1[ib]);
  return v0 + te * (v1 - v0);
}

}  // namespace recoil
