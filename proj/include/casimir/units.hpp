/**
 * @file units.hpp
 * @brief Internal unit system and physical constants.
 *
 * Energies (and frequencies, stored as hbar*omega) are in eV, lengths in nm,
 * temperatures in K and dipole moments in Debye. Green tensors Gamma carry
 * units of nm^-3, so a dipole contraction d.Gamma.d is in Debye^2/nm^3 and
 * multiplying by dipole_energy_eV converts d.Gamma.d/eps0 into eV.
 */
#ifndef CASIMIR_UNITS_HPP
#define CASIMIR_UNITS_HPP

#include <complex>
#include <numbers>

namespace casimir {

using cplx = std::complex<double>;

namespace units {

inline constexpr double pi = std::numbers::pi;

/// hbar*c in eV nm.
inline constexpr double hbar_c = 197.3269804;

/// Boltzmann constant in eV/K.
inline constexpr double k_B = 8.617333262e-5;

namespace si {
inline constexpr double c = 299792458.0;
inline constexpr double eps0 = 8.8541878128e-12;
inline constexpr double e = 1.602176634e-19;
inline constexpr double debye = 1e-21 / c;  // C m
}  // namespace si

/// (1 Debye)^2 / (eps0 * 1 nm^3) expressed in eV (about 7.8433e-3 eV).
inline constexpr double dipole_energy_eV =
    si::debye * si::debye / (si::eps0 * 1e-27) / si::e;

/// Thermal energy k_B T in eV.
constexpr double thermal_energy(double temperature_K) { return k_B * temperature_K; }

/// Wavenumber (1/nm) for a photon energy hbar*omega given in eV.
constexpr double wavenumber(double hbar_omega_eV) { return hbar_omega_eV / hbar_c; }
inline cplx wavenumber(cplx hbar_omega_eV) { return hbar_omega_eV / hbar_c; }

/// Photon energy (eV) whose vacuum wavenumber is k (1/nm).
constexpr double energy_from_wavenumber(double k_per_nm) { return k_per_nm * hbar_c; }

}  // namespace units
}  // namespace casimir

#endif
