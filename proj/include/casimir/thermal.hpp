/**
 * @file thermal.hpp
 * @brief Thermal Casimir-Polder potentials of a particle in an energy eigenstate.
 *
 * Energies in eV, dipole dyads in Debye^2, Gamma in nm^-3. A contraction
 * d.Gamma.d / eps0 becomes an energy through units::dipole_energy_eV.
 */
#ifndef CASIMIR_THERMAL_HPP
#define CASIMIR_THERMAL_HPP

#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"
#include "gamma_provider.hpp"
#include "numerics/matsubara.hpp"
#include "numerics/quadrature.hpp"
#include "units.hpp"

namespace casimir {

/// One dipole transition n -> k.
struct Transition {
  double omega_ev = 0.0;  // E_k - E_n, signed
  Mat3c dyad = Mat3c::Zero();  // d_nk (x) d_kn in Debye^2
  bool isotropic = false;

  static Transition isotropic_dipole(double omega_ev, double d2_debye2) {
    if (!(d2_debye2 >= 0.0)) throw DomainError("Transition: |d|^2 must be >= 0");
    Transition t;
    t.omega_ev = omega_ev;
    t.dyad = (d2_debye2 / 3.0) * Mat3c::Identity();
    t.isotropic = true;
    t.validate();
    return t;
  }

  static Transition from_dipole(double omega_ev, const Eigen::Vector3cd& d_nk) {
    Transition t;
    t.omega_ev = omega_ev;
    t.dyad = d_nk * d_nk.adjoint();
    t.validate();
    return t;
  }

  static Transition from_dyad(double omega_ev, const Mat3c& dyad) {
    Transition t;
    t.omega_ev = omega_ev;
    t.dyad = dyad;
    t.validate();
    return t;
  }

  /// |d_nk|^2 = Tr(dyad).
  double d2() const { return dyad.trace().real(); }

  void validate() const {
    if (omega_ev == 0.0 || !std::isfinite(omega_ev)) throw DomainError("Transition: omega_kn must be finite and non-zero");
    if ((dyad - dyad.adjoint()).norm() > 1e-12 * (1.0 + dyad.norm()))
      throw DomainError("Transition: dipole dyad must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat3c> es(dyad);
    if (es.eigenvalues().minCoeff() < -1e-12 * (1.0 + dyad.norm()))
      throw DomainError("Transition: dipole dyad must be positive semidefinite");
  }
};

struct Particle {
  std::string label = "particle";
  std::vector<Transition> transitions;

  void validate() const {
    if (transitions.empty()) throw DomainError("Particle: at least one transition is required");
    for (const auto& t : transitions) t.validate();
  }

  bool isotropic() const {
    for (const auto& t : transitions)
      if (!t.isotropic) return false;
    return true;
  }

  /// Same transitions with all frequencies negated (ground <-> excited bookkeeping).
  Particle flipped() const {
    Particle p = *this;
    for (auto& t : p.transitions) t.omega_ev = -t.omega_ev;
    return p;
  }
};

struct ThermalContext {
  double T = 0.0;  // K
  numerics::MatsubaraPolicy matsubara;
  numerics::QuadratureSpec quad{numerics::QuadScheme::gauss_kronrod, 1e-8, 0.0, 20000, 1.0};

  void validate() const {
    if (!(T >= 0.0) || !std::isfinite(T)) throw DomainError("ThermalContext: temperature must be finite and >= 0");
    matsubara.validate();
  }
};

namespace detail {

/// Re Tr(G D) = d_nk . G . d_kn for symmetric G and Hermitian D.
inline double contract(const Mat3c& G, const Mat3c& D) { return (G * D).trace().real(); }
inline double contract(const Mat3& G, const Mat3c& D) { return (G.cast<cplx>() * D).trace().real(); }

inline void check_provider(const Particle& p, const GammaProvider& g) {
  if (g.isotropic_only() && !p.isotropic())
    throw DomainError("provider '" + g.describe() + "' only supports isotropic particles");
}

}  // namespace detail

/// alpha_n(i xi) = 2 sum_k E_k D_k / (E_k^2 + xi^2) in Debye^2/eV, with E_k = hbar omega_kn, xi = hbar xi.
inline Mat3c polarizability(const Particle& p, double xi_ev) {
  if (!(xi_ev >= 0.0)) throw DomainError("polarizability: imaginary frequency must be >= 0");
  Mat3c a = Mat3c::Zero();
  for (const auto& t : p.transitions) a += (2.0 * t.omega_ev / (t.omega_ev * t.omega_ev + xi_ev * xi_ev)) * t.dyad;
  return a;
}

struct NonresonantResult {
  double value;  // eV
  long terms;    // Matsubara terms (0 for the zero-temperature integral)
  double tail;   // tail estimate included in value (eV)
};

/// U_nr = -(k_B T / eps0) sum'_j Tr[alpha(i xi_j) Gamma_{i xi_j}]; at T = 0 the frequency integral
/// -(1/2 pi eps0) Int_0^inf d(hbar xi) Tr[alpha Gamma].
inline NonresonantResult nonresonant_potential(const Particle& p, const GammaProvider& g, const ThermalContext& ctx) {
  p.validate();
  ctx.validate();
  detail::check_provider(p, g);
  auto integrand = [&](double xi) {
    const Mat3c G = g.gamma(cplx(0.0, xi));
    double s = 0.0;
    for (const auto& t : p.transitions)
      s += 2.0 * t.omega_ev / (t.omega_ev * t.omega_ev + xi * xi) * detail::contract(G, t.dyad);
    return s;
  };
  if (ctx.T == 0.0) {
    double scale = units::hbar_c / (2.0 * g.distance_scale());
    for (const auto& t : p.transitions) scale = std::min(scale, std::abs(t.omega_ev));
    numerics::QuadratureSpec spec = ctx.quad;
    spec.scale = scale;
    const auto r = numerics::integrate_semi_infinite(integrand, spec);
    return {-r.value / (2.0 * units::pi) * units::dipole_energy_eV, 0, 0.0};
  }
  const double kT = units::thermal_energy(ctx.T);
  const auto sum = numerics::matsubara_sum([&](long, double xi) { return integrand(xi); }, ctx.T, ctx.matsubara);
  return {-kT * sum.value * units::dipole_energy_eV, sum.terms, -kT * sum.tail * units::dipole_energy_eV};
}

/// U_r = (1/eps0) sum_k n(omega_kn) d_nk . Re Gamma_{omega_kn} . d_kn.
inline double resonant_potential(const Particle& p, const GammaProvider& g, const ThermalContext& ctx) {
  p.validate();
  ctx.validate();
  detail::check_provider(p, g);
  double u = 0.0;
  for (const auto& t : p.transitions) {
    const double n = numerics::photon_number(t.omega_ev, ctx.T);
    if (n == 0.0) continue;
    const Mat3 re = g.gamma(t.omega_ev).real();
    u += n * detail::contract(re, t.dyad);
  }
  return u * units::dipole_energy_eV;
}

/// U = -(1/2 eps0) sum_k d_nk . Gamma_0 . d_kn; independent of temperature and of the transition frequencies.
inline double temperature_independent_potential(const Particle& p, const Mat3& gamma0) {
  p.validate();
  double u = 0.0;
  for (const auto& t : p.transitions) u += detail::contract(gamma0, t.dyad);
  return -0.5 * u * units::dipole_energy_eV;
}

struct PotentialBreakdown {
  double total;
  double nonresonant;
  double resonant;
  long matsubara_terms;
};

inline PotentialBreakdown total_potential(const Particle& p, const GammaProvider& g, const ThermalContext& ctx) {
  const auto nr = nonresonant_potential(p, g, ctx);
  const double r = resonant_potential(p, g, ctx);
  return {nr.value + r, nr.value, r, nr.terms};
}

/// Delta U_retard = (k_B T / 2 eps0) sum_k E_k d_nk . Gamma_0'' . d_kn, with Gamma_0'' per (hbar omega)^2.
inline double retardation_correction(const Particle& p, const Mat3& gamma0_dd, const ThermalContext& ctx) {
  p.validate();
  ctx.validate();
  double s = 0.0;
  for (const auto& t : p.transitions) s += t.omega_ev * detail::contract(gamma0_dd, t.dyad);
  return 0.5 * units::thermal_energy(ctx.T) * s * units::dipole_energy_eV;
}

/// Delta U = (k_B T / eps0) sum_k d_nk . DeltaGamma_k . d_kn / E_k for per-transition tensors DeltaGamma_k.
inline double reflectivity_correction(const Particle& p, const std::vector<Mat3>& delta_gamma, const ThermalContext& ctx) {
  p.validate();
  ctx.validate();
  if (delta_gamma.size() != p.transitions.size())
    throw DomainError("reflectivity_correction: one Delta Gamma per transition required");
  double s = 0.0;
  for (std::size_t k = 0; k < delta_gamma.size(); ++k)
    s += detail::contract(delta_gamma[k], p.transitions[k].dyad) / p.transitions[k].omega_ev;
  return units::thermal_energy(ctx.T) * s * units::dipole_energy_eV;
}

/// Re Gamma^nret_{omega_kn} - Gamma_0 for each transition.
inline std::vector<Mat3> reflectivity_delta(const Particle& p, const GammaProvider& g) {
  const Mat3 g0 = g.gamma0();
  std::vector<Mat3> out;
  for (const auto& t : p.transitions) out.push_back(g.gamma_nonretarded(t.omega_ev).real() - g0);
  return out;
}

/// Re Gamma_{omega_kn} - Gamma_0 with the provider's kernel (retardation and reflectivity together).
inline std::vector<Mat3> full_delta(const Particle& p, const GammaProvider& g) {
  const Mat3 g0 = g.gamma0();
  std::vector<Mat3> out;
  for (const auto& t : p.transitions) out.push_back(g.gamma(t.omega_ev).real() - g0);
  return out;
}

/// Leading high-temperature correction with DeltaGamma = Re Gamma_{omega_kn} - Gamma_0 (provider kernel).
inline double linear_temperature_correction(const Particle& p, const GammaProvider& g, const ThermalContext& ctx) {
  return reflectivity_correction(p, full_delta(p, g), ctx);
}

}  // namespace casimir

#endif
