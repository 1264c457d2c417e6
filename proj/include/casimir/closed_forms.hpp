/**
 * @file closed_forms.hpp
 * @brief Perfect-conductor closed forms (plate, sphere, cylindrical cavity) and
 *        geometry-constant correction ratios.
 *
 * Potentials follow U = -(1/6 eps0) (sum_k |d_nk|^2) Tr Gamma_0 for isotropic
 * particles; d2_sum is in Debye^2 and energies are returned in eV.
 */
#ifndef CASIMIR_CLOSED_FORMS_HPP
#define CASIMIR_CLOSED_FORMS_HPP

#include <cmath>
#include <string>

#include "born/kernel.hpp"
#include "born/scattering.hpp"
#include "error.hpp"
#include "materials.hpp"
#include "numerics/bessel.hpp"
#include "numerics/quadrature.hpp"
#include "units.hpp"

namespace casimir::closed_forms {

using born::GammaTensor;
using born::KernelKind;
using born::Mat3;
using born::Mat3c;
using born::Vec3;

/// Static image tensor of a perfectly conducting plane at height z (z axis normal).
inline GammaTensor plate_gamma0(double z) {
  if (!(z > 0.0)) throw DomainError("plate_gamma0: distance must be > 0");
  Mat3c g = Mat3c::Zero();
  const double s = 1.0 / (32.0 * units::pi * z * z * z);
  g(0, 0) = s;
  g(1, 1) = s;
  g(2, 2) = 2.0 * s;
  return {g, 0.0, Vec3(0.0, 0.0, z), KernelKind::nonretarded};
}

/// Retarded image tensor of a perfectly conducting plane: field of the mirror dipole
/// diag(-1, -1, 1) d located 2z below the particle.
inline GammaTensor plate_gamma(double z, cplx hw) {
  if (!(z > 0.0)) throw DomainError("plate_gamma: distance must be > 0");
  const cplx k = units::wavenumber(hw);
  Mat3c mirror = Mat3c::Zero();
  mirror(0, 0) = -1.0;
  mirror(1, 1) = -1.0;
  mirror(2, 2) = 1.0;
  const Mat3c g = born::kernel_A(Vec3(0.0, 0.0, 2.0 * z), k, KernelKind::retarded) * mirror;
  return {g, hw, Vec3(0.0, 0.0, z), k == 0.0 ? KernelKind::nonretarded : KernelKind::retarded};
}

/// Isotropic-particle potential from a static trace: U = -(d2/6) Tr Gamma_0 in eV.
inline double potential_from_trace(double trace_gamma0, double d2_sum) {
  return -d2_sum * trace_gamma0 / 6.0 * units::dipole_energy_eV;
}

/// Tr Gamma_0 outside a perfectly conducting sphere, r = centre distance.
inline double sphere_trace_gamma0_pc(double r, double R) {
  if (!(R > 0.0) || !(r > R)) throw DomainError("sphere_potential_pc: need r > R > 0");
  const double r2 = r * r, R2 = R * R;
  return R * R2 * (6.0 * r2 * r2 - 3.0 * r2 * R2 + R2 * R2) / (4.0 * units::pi * r2 * r2 * std::pow(r2 - R2, 3));
}

/// U(r) = -R^3 (6r^4 - 3r^2R^2 + R^4) d2 / (24 pi eps0 r^4 (r^2 - R^2)^3), in eV.
inline double sphere_potential_pc(double r, double R, double d2_sum) {
  return potential_from_trace(sphere_trace_gamma0_pc(r, R), d2_sum);
}

/// Range and weighting of the azimuthal sum in the cylindrical-cavity integral.
enum class AzimuthalSum {
  half_weight_zero,  // m >= 0 with the m = 0 term halved
  unit_weight_zero,  // m >= 0, all weights 1
  symmetric,         // m from -inf to inf
};

inline const char* to_string(AzimuthalSum s) {
  switch (s) {
    case AzimuthalSum::half_weight_zero: return "m>=0,w0=1/2";
    case AzimuthalSum::unit_weight_zero: return "m>=0,w0=1";
    default: return "m=-inf..inf";
  }
}

struct CylinderOptions {
  AzimuthalSum m_sum = AzimuthalSum::half_weight_zero;
  numerics::QuadratureSpec quad{numerics::QuadScheme::gauss_kronrod, 1e-11, 0.0, 400000, 1.0};
  double m_sum_tol = 1e-10;
};

struct CylinderResult {
  double trace_gamma0;
  double quad_error;
  int m_terms;
};

/// Integrand of the cylindrical-cavity trace for order m at wavenumber q, axis distance rho, radius R:
/// (K_m/I_m)(qR) {[(m/rho)^2 + q^2] I_m(q rho)^2 + q^2 I_m'(q rho)^2}, with the rho = 0 limit taken per term.
inline double cylinder_integrand(int m, double q, double rho, double R) {
  if (!(q > 0.0)) {
    // q -> 0 limit: m (rho/R)^(2m) / rho^2 for m >= 1
    if (m == 0) return 0.0;
    if (rho == 0.0) return m == 1 ? 1.0 / (R * R) : 0.0;
    return m * std::pow(rho / R, 2 * m) / (rho * rho);
  }
  if (2.0 * q * (R - rho) > 1400.0) return 0.0;  // below the smallest double
  const auto a = numerics::bessel_modified_log(m, q * R);
  if (rho == 0.0) {
    // I_0(0) = 1, I_0'(0) = 0; (1/rho) I_1(q rho) -> q/2 and I_1'(0) = 1/2; m >= 2 vanish.
    const double ratio = a.K / a.I * std::exp(-2.0 * a.log_scale);
    if (m == 0) return q * q * ratio;
    if (m == 1) return 0.5 * q * q * ratio;
    return 0.0;
  }
  const auto b = numerics::bessel_modified_log(m, q * rho);
  const double mr = m / rho;
  const double lead = std::log(std::abs(a.K / a.I)) + 2.0 * (b.log_scale - a.log_scale);
  const double bracket = (mr * mr + q * q) * b.I * b.I + q * q * b.dI * b.dI;
  if (bracket == 0.0) return 0.0;
  return std::exp(lead + std::log(bracket));
}

/// Tr Gamma_0 inside an infinitely long perfectly conducting cylindrical cavity of radius R at axis distance rho.
inline CylinderResult cylinder_trace_gamma0_pc(double rho, double R, const CylinderOptions& opt = {}) {
  if (!(R > 0.0) || !(rho >= 0.0) || !(rho < R)) throw DomainError("cylinder_potential_pc: need 0 <= rho < R");
  numerics::QuadratureSpec spec = opt.quad;
  const double gap = R - rho;
  // The integrand decays as exp(-2 q gap); it is cut to zero once that factor underflows.
  spec.scale = 1.0 / (2.0 * gap);
  double total = 0.0, err = 0.0;
  int small = 0, m = 0;
  for (; m <= numerics::bessel_max_order; ++m) {
    if (rho == 0.0 && m >= 2) break;
    auto f = [&](double q) { return cylinder_integrand(m, q, rho, R); };
    const auto res = numerics::integrate_semi_infinite(f, spec);
    double w = 1.0;
    if (m == 0) w = opt.m_sum == AzimuthalSum::half_weight_zero ? 0.5 : 1.0;
    else if (opt.m_sum == AzimuthalSum::symmetric) w = 2.0;
    const double term = w * res.value;
    total += term;
    err += w * res.error;
    if (m > 0 && std::abs(term) < opt.m_sum_tol * std::abs(total)) {
      if (++small >= 2) break;
    } else {
      small = 0;
    }
  }
  if (m > numerics::bessel_max_order)
    throw ConvergenceError("cylinder_potential_pc: azimuthal sum needs orders beyond 200 (point too close to the wall)",
                           total / (units::pi * units::pi), err);
  const double s = 1.0 / (units::pi * units::pi);
  return {total * s, err * s, m + 1};
}

/// U(rho) = -(d2 / 6 pi^2 eps0) Int dq sum_m (K_m/I_m)(qR) {...}, in eV.
inline double cylinder_potential_pc(double rho, double R, double d2_sum, const CylinderOptions& opt = {}) {
  return potential_from_trace(cylinder_trace_gamma0_pc(rho, R, opt).trace_gamma0, d2_sum);
}

enum class GeometryTag { sphere_external, plate, spherical_cavity, cylindrical_cavity };

inline const char* to_string(GeometryTag t) {
  switch (t) {
    case GeometryTag::sphere_external: return "sphere_external";
    case GeometryTag::plate: return "plate";
    case GeometryTag::spherical_cavity: return "spherical_cavity";
    default: return "cylindrical_cavity";
  }
}

/// z is the surface distance for sphere_external and plate, the centre distance rho for cavities.
struct GeometryClass {
  GeometryTag tag;
  double R = 0.0;
  double z = 0.0;

  void validate() const {
    switch (tag) {
      case GeometryTag::sphere_external:
        if (!(R > 0.0) || !(z > 0.0)) throw DomainError("sphere_external: need R > 0 and surface distance z > 0");
        break;
      case GeometryTag::plate:
        if (!(z > 0.0)) throw DomainError("plate: need z > 0");
        break;
      default:
        if (!(R > 0.0) || !(z >= 0.0) || !(z < R)) throw DomainError("cavity: need 0 <= rho < R");
    }
  }
};

struct GeometryConstants {
  double c_retard;
  double c_refl;
};

inline GeometryConstants geometry_constants(const GeometryClass& g) {
  g.validate();
  switch (g.tag) {
    case GeometryTag::sphere_external: return {-1.0 / 3.0, g.R / g.z};
    case GeometryTag::plate: return {0.0, 6.0};
    case GeometryTag::spherical_cavity: return {3.0 / 5.0, 3.0};
    default:
      throw DomainError("correction_ratios: no closed geometry constants for the cylindrical cavity");
  }
}

struct CorrectionRatios {
  double retardation;   // c_retard (k_B T / hbar w)(z w / c)^2
  double reflectivity;  // -c_refl (k_B T / hbar w)(z |w| / c) Re[i/sqrt(eps)]
  double total;
};

/// Relative linear-in-T corrections for transition energy hw (eV, signed) at temperature T.
inline CorrectionRatios correction_ratios(const GeometryClass& g, double hw, double T, const Material& m) {
  if (hw == 0.0) throw DomainError("correction_ratios: transition frequency must be non-zero");
  if (T < 0.0) throw DomainError("correction_ratios: temperature must be >= 0");
  const GeometryConstants c = geometry_constants(g);
  const double thermal = units::thermal_energy(T) / hw;
  const double kz = units::wavenumber(std::abs(hw)) * g.z;
  const auto sf = m.drude_surface_factor(hw);
  const double surface = std::isnan(sf.approx) ? sf.exact : sf.approx;
  CorrectionRatios r{};
  r.retardation = c.c_retard * thermal * kz * kz;
  r.reflectivity = -c.c_refl * thermal * kz * surface;
  r.total = r.retardation + r.reflectivity;
  return r;
}

}  // namespace casimir::closed_forms

#endif
