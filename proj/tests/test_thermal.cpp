#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include <casimir/born/scattering.hpp>
#include <casimir/born/voxel_body.hpp>
#include <casimir/gamma_provider.hpp>
#include <casimir/thermal.hpp>

#include "mock_providers.hpp"

namespace {

using namespace casimir;
using casimir::testing::FlatProvider;
using casimir::testing::LorentzProvider;

const double pi = units::pi;

class ZeroProvider final : public GammaProvider {
 public:
  Mat3c gamma(cplx) const override { return Mat3c::Zero(); }
  Mat3c gamma_nonretarded(cplx) const override { return Mat3c::Zero(); }
  Mat3 gamma0() const override { return Mat3::Zero(); }
  Mat3 gamma0_dd() const override { return Mat3::Zero(); }
  KernelKind kernel() const override { return KernelKind::nonretarded; }
  double distance_scale() const override { return 1.0; }
  std::string describe() const override { return "zero"; }
};

// Sum'_{j>=0} 1/(E^2 + a^2 j^2) = pi/(2 a E) coth(pi E / a).
double half_sum(double E, double a) { return pi / (2.0 * a * E) / std::tanh(pi * E / a); }

struct LorentzOracle {
  double g0, W, E, d2;

  double nonresonant(double T) const {
    if (T == 0.0) return -std::copysign(1.0, E) * d2 * g0 * W / (2.0 * (std::abs(E) + W)) * units::dipole_energy_eV;
    const double kT = units::thermal_energy(T), a = 2.0 * pi * kT;
    const double s = (half_sum(E, a) - half_sum(W, a)) / (W * W - E * E);
    return -kT * 2.0 * E * d2 * g0 * W * W * s * units::dipole_energy_eV;
  }
  double resonant(double T) const {
    return numerics::photon_number(E, T) * d2 * g0 * W * W / (W * W - E * E) * units::dipole_energy_eV;
  }
};

Particle two_level(double E, double d2) { return Particle{"two-level", {Transition::isotropic_dipole(E, d2)}}; }

ThermalContext at(double T) {
  ThermalContext c;
  c.T = T;
  return c;
}

TEST(Polarizability, LimitsAndMonotonicity) {
  const Particle p = two_level(0.2, 3.0);
  EXPECT_NEAR(polarizability(p, 0.0)(0, 0).real(), 2.0 / 0.2 * 1.0, 1e-14);
  double prev = INFINITY;
  for (double xi : {0.0, 0.1, 1.0, 10.0}) {
    const double a = polarizability(p, xi)(1, 1).real();
    EXPECT_LT(a, prev);
    prev = a;
  }
  EXPECT_NEAR(polarizability(p, 1e4)(2, 2).real() * 1e8, 2.0 * 0.2, 1e-8);
  EXPECT_THROW(polarizability(p, -1.0), DomainError);
}

TEST(Polarizability, MatsubaraIdentity) {
  // k_B T sum'_j alpha(i xi_j) = sum_k [n(w_k) + 1/2] d d.
  for (double E : {0.02, -0.02, 0.3}) {
    const Particle p = two_level(E, 3.0);
    const double T = 300.0;
    numerics::MatsubaraPolicy pol;
    pol.rel_tail_tol = 1e-12;
    const auto s = numerics::matsubara_sum([&](long, double xi) { return polarizability(p, xi)(0, 0).real(); }, T, pol);
    const double lhs = units::thermal_energy(T) * s.value;
    const double rhs = (numerics::photon_number(E, T) + 0.5) * 1.0;
    EXPECT_NEAR(lhs / rhs, 1.0, 1e-6) << E;
  }
}

TEST(Thermal, FreeSpaceGivesZero) {
  ZeroProvider z;
  for (double T : {0.0, 300.0}) {
    const auto u = total_potential(two_level(0.1, 2.0), z, at(T));
    EXPECT_EQ(u.total, 0.0);
  }
}

TEST(Thermal, LorentzNonresonantMatchesPartialFractions) {
  const LorentzOracle o{2e-4, 0.05, 0.02, 4.0};
  LorentzProvider g(o.g0, o.W);
  for (double E : {0.02, -0.02}) {
    LorentzOracle oe = o;
    oe.E = E;
    for (double T : {0.0, 4.0, 77.0, 300.0, 600.0}) {
      ThermalContext c = at(T);
      c.matsubara.rel_tail_tol = 1e-12;
      const double u = nonresonant_potential(two_level(E, o.d2), g, c).value;
      EXPECT_NEAR(u / oe.nonresonant(T), 1.0, 1e-7) << "E=" << E << " T=" << T;
    }
  }
}

TEST(Thermal, LorentzResonantTerm) {
  LorentzProvider g(2e-4, 0.05);
  for (double E : {0.02, -0.02}) {
    const LorentzOracle o{2e-4, 0.05, E, 4.0};
    for (double T : {0.0, 300.0})
      EXPECT_NEAR(resonant_potential(two_level(E, 4.0), g, at(T)), o.resonant(T), 1e-12 * std::abs(o.resonant(300.0)))
          << E << " " << T;
  }
  // ground state at T = 0 has no resonant part; excited state keeps -d.Re Gamma.d
  EXPECT_EQ(resonant_potential(two_level(0.02, 4.0), g, at(0.0)), 0.0);
  EXPECT_LT(resonant_potential(two_level(-0.02, 4.0), g, at(0.0)), 0.0);
}

TEST(Thermal, FlatResponseCancelsTemperature) {
  // Nonresonant part alone is -[n + 1/2] d.G0.d; the resonant part removes the n.
  const Mat3 g0 = Vec3(1.0, 2.0, 3.0).asDiagonal() * 1e-4;
  FlatProvider g(g0);
  Eigen::Vector3cd d(1.0, cplx(0.5, 0.5), -2.0);
  for (double E : {0.03, -0.03}) {
    const Particle p{"aniso", {Transition::from_dipole(E, d)}};
    const double u0 = temperature_independent_potential(p, g0);
    for (double T : {0.0, 4.0, 77.0, 300.0, 600.0}) {
      const auto u = total_potential(p, g, at(T));
      EXPECT_NEAR(u.total / u0, 1.0, 1e-6) << E << " " << T;
      EXPECT_EQ(u.total, u.nonresonant + u.resonant);
      const double n = T == 0.0 ? (E > 0 ? 0.0 : -1.0) : numerics::photon_number(E, T);
      EXPECT_NEAR(u.nonresonant / (2.0 * (n + 0.5) * u0), 1.0, 1e-6);
    }
  }
}

TEST(Thermal, TemperatureIndependentPotentialNearPlate) {
  const double z = 20.0, d2 = 5.0;
  PlateGammaProvider plate(z, KernelKind::nonretarded);
  const double expect = -d2 / (48.0 * pi * z * z * z) * units::dipole_energy_eV;
  EXPECT_NEAR(temperature_independent_potential(two_level(0.1, d2), plate.gamma0()) / expect, 1.0, 1e-12);
  EXPECT_EQ(temperature_independent_potential(two_level(0.1, d2), plate.gamma0()),
            temperature_independent_potential(two_level(0.1, d2).flipped(), plate.gamma0()));
  EXPECT_NEAR(total_potential(two_level(-0.1, d2), plate, at(300.0)).total / expect, 1.0, 1e-6);
}

TEST(Thermal, RetardationCorrectionPlateVanishes) {
  PlateGammaProvider plate(20.0, KernelKind::retarded);
  EXPECT_NEAR(retardation_correction(two_level(0.1, 5.0), plate.gamma0_dd(), at(300.0)), 0.0, 1e-20);
  LorentzProvider g(2e-4, 0.05);
  EXPECT_EQ(retardation_correction(two_level(0.1, 5.0), g.gamma0_dd(), at(0.0)), 0.0);
}

TEST(Thermal, PecBodyHasNoReflectivityCorrection) {
  auto solver = std::make_shared<const born::ScatteringSolver>(
      born::voxelize(born::SphereShape{10.0}, 6, Material::perfect_conductor()));
  VoxelGammaProvider g(solver, Vec3(0, 0, 25), KernelKind::nonretarded);
  const Particle p = two_level(0.1, 2.0);
  EXPECT_EQ(reflectivity_correction(p, reflectivity_delta(p, g), at(300.0)), 0.0);
}

TEST(Thermal, LinearRegimeSlopeMatchesEstimator) {
  const double E = 0.01;
  LorentzProvider g(2e-4, 0.03);
  const Particle p = two_level(E, 4.0);
  const double u0 = temperature_independent_potential(p, g.gamma0());
  const double T1 = 5e4, T2 = 1e5;
  const double slope = (total_potential(p, g, at(T2)).total - total_potential(p, g, at(T1)).total) / (T2 - T1);
  const double predicted = linear_temperature_correction(p, g, at(T1)) / T1;
  EXPECT_NEAR(slope / predicted, 1.0, 0.02);
  EXPECT_GT(std::abs(slope * T1 / u0), 1.0);  // genuinely in the high-temperature regime
}

TEST(Thermal, Validation) {
  LorentzProvider g(2e-4, 0.03);
  EXPECT_THROW(total_potential(two_level(0.1, 1.0), g, at(-1.0)), DomainError);
  EXPECT_THROW(total_potential(Particle{}, g, at(1.0)), DomainError);
  EXPECT_THROW(Transition::isotropic_dipole(0.0, 1.0), DomainError);
  EXPECT_THROW(Transition::isotropic_dipole(0.1, -1.0), DomainError);
  StaticTraceProvider iso(1.0, 1.0, "trace");
  const Particle aniso{"a", {Transition::from_dipole(0.1, Eigen::Vector3cd(1, 0, 0))}};
  EXPECT_THROW(total_potential(aniso, iso, at(1.0)), DomainError);
}

}  // namespace
