#pragma once

// Physical constants and unit conventions.
//
// Internal units throughout the core: energies in eV, lengths in nm,
// masses in amu, number densities in atoms/nm^3. Mass densities are
// accepted in g/cm^3 and converted once at material construction.

namespace recoil {

constexpr double kAvogadro = 6.02214076e23;        // 1/mol
constexpr double kElementaryChargeC = 1.602176634e-19;
constexpr double kBohrRadiusNm = 0.0529177210903;
constexpr double kCoulombEvNm = 1.4399645;          // e^2/(4 pi eps0) [eV nm]
constexpr double kAmuEv = 931.49410242e6;           // amu c^2 [eV]
constexpr double kInvFineStructure = 137.035999084;

// Kinetic energy of one amu moving at the Bohr velocity, E = amu*v0^2/2 [eV].
constexpr double kBohrVelocityEvPerAmu =
    0.5 * kAmuEv / (kInvFineStructure * kInvFineStructure);

// atoms/nm^3 from g/cm^3: rho * N_A / molar_mass * 1e-21
constexpr double kDensityToAtomsPerNm3 = kAvogadro * 1e-21;

}  // namespace recoil
