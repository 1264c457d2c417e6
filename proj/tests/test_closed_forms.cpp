#include <cmath>

#include <gtest/gtest.h>

#include <casimir/born/scattering.hpp>
#include <casimir/born/voxel_body.hpp>
#include <casimir/closed_forms.hpp>

namespace {

using namespace casimir;
using namespace casimir::closed_forms;

const double pi = units::pi;

TEST(PlateClosedForm, StaticTensorAndPotential) {
  const double z = 7.0, d2 = 3.0;
  const Mat3 g = plate_gamma0(z).value.real();
  EXPECT_NEAR(g(0, 0), 1.0 / (32.0 * pi * z * z * z), 1e-18);
  EXPECT_NEAR(g(2, 2), 2.0 * g(0, 0), 1e-18);
  const double u = potential_from_trace(g.trace(), d2);
  const double expect = -d2 / (48.0 * pi * z * z * z) * units::dipole_energy_eV;
  EXPECT_NEAR(u / expect, 1.0, 1e-9);
  EXPECT_THROW(plate_gamma0(0.0), DomainError);
}

TEST(PlateClosedForm, RetardedReducesToStatic) {
  const double z = 50.0;
  const Mat3c g0 = plate_gamma0(z).value;
  EXPECT_LT((plate_gamma(z, 0.0).value - g0).norm(), 1e-15 * g0.norm());
  // hbar c k * 2z = 1e-3
  const double hw = 1e-3 * units::hbar_c / (2.0 * z);
  EXPECT_LT((plate_gamma(z, hw).value - g0).norm(), 1e-5 * g0.norm());
  EXPECT_GT((plate_gamma(z, hw).value - g0).norm(), 0.0);
}

TEST(SphereClosedForm, TwoRadii) {
  // U = -85 d2 / (10368 pi eps0 R^3) at r = 2R.
  const double R = 1.0;
  EXPECT_NEAR(sphere_potential_pc(2.0, R, 1.0) / units::dipole_energy_eV, -85.0 / (10368.0 * pi), 1e-15);
  const double R2 = 13.0;
  EXPECT_NEAR(sphere_potential_pc(2.0 * R2, R2, 1.0) / units::dipole_energy_eV * std::pow(R2, 3), -85.0 / (10368.0 * pi),
              1e-15);
}

TEST(SphereClosedForm, FarFieldIsPointPolarizable) {
  // Static point sphere of polarizability 4 pi R^3 seen by a dipole: Tr = 6 R^3 / (4 pi r^6), next order 2.5 (R/r)^2.
  const double R = 1.0;
  for (double r : {100.0, 1000.0}) {
    const double far = 6.0 * R * R * R / (4.0 * pi * std::pow(r, 6));
    EXPECT_NEAR(sphere_trace_gamma0_pc(r, R) / far, 1.0 + 2.5 / (r * r), 1e-3 / (r * r));
  }
}

TEST(SphereClosedForm, PlateLimit) {
  const double R = 1.0;
  const double z1 = 1e-3, z2 = 1e-2;
  const double slope = std::log(sphere_potential_pc(R + z2, R, 1.0) / sphere_potential_pc(R + z1, R, 1.0)) /
                       std::log(z2 / z1);
  EXPECT_NEAR(slope, -3.0, 0.05);
  // The touching sphere looks like a plane: U -> -d2 / (48 pi eps0 z^3).
  const double z = 1e-5;
  const double plate = potential_from_trace(plate_gamma0(z).value.real().trace(), 1.0);
  EXPECT_NEAR(sphere_potential_pc(R + z, R, 1.0) / plate, 1.0, 1e-4);
}

TEST(SphereClosedForm, NegativeAndDomain) {
  for (double r : {1.01, 1.5, 3.0, 30.0}) EXPECT_LT(sphere_potential_pc(r, 1.0, 2.0), 0.0);
  EXPECT_THROW(sphere_potential_pc(1.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(sphere_potential_pc(2.0, 0.0, 1.0), DomainError);
}

// Reference traces (R = 1, m = 0 weighted 1/2) from an independent arbitrary-precision evaluation.
TEST(CylinderClosedForm, FrozenValues) {
  EXPECT_NEAR(cylinder_trace_gamma0_pc(0.0, 1.0).trace_gamma0, 0.159590298477303, 1e-10);
  EXPECT_NEAR(cylinder_trace_gamma0_pc(0.3, 1.0).trace_gamma0, 0.230702215387008, 1e-9);
  EXPECT_NEAR(cylinder_trace_gamma0_pc(0.5, 1.0).trace_gamma0, 0.472189551154097, 1e-9);
}

TEST(CylinderClosedForm, AzimuthalSumConventions) {
  // On the axis only m = 0, 1 contribute: unit weight adds the m = 0 half again, symmetric adds the m = 1 term again.
  CylinderOptions unit, sym;
  unit.m_sum = AzimuthalSum::unit_weight_zero;
  sym.m_sum = AzimuthalSum::symmetric;
  EXPECT_NEAR(cylinder_trace_gamma0_pc(0.0, 1.0, unit).trace_gamma0, 0.192362091158168, 1e-10);
  const double half = cylinder_trace_gamma0_pc(0.3, 1.0).trace_gamma0;
  EXPECT_NEAR(cylinder_trace_gamma0_pc(0.3, 1.0, sym).trace_gamma0, 2.0 * half, 1e-9);
}

TEST(CylinderClosedForm, ScaleInvariance) {
  for (double lambda : {0.01, 7.0, 1e4}) {
    for (double x : {0.0, 0.4}) {
      const double a = cylinder_potential_pc(x, 1.0, 1.0);
      const double b = cylinder_potential_pc(lambda * x, lambda, 1.0);
      EXPECT_NEAR(b * std::pow(lambda, 3) / a, 1.0, 1e-8);
    }
  }
}

TEST(CylinderClosedForm, StrengthensTowardWall) {
  double prev = 0.0;
  for (double x : {0.0, 0.3, 0.6, 0.9}) {
    const double u = cylinder_potential_pc(x, 1.0, 1.0);
    EXPECT_LT(u, prev);
    prev = u;
  }
}

TEST(CylinderClosedForm, QuadratureSchemesAgree) {
  CylinderOptions de;
  de.quad.scheme = numerics::QuadScheme::double_exponential;
  de.quad.rel_tol = 1e-11;
  for (double x : {0.0, 0.6})
    EXPECT_NEAR(cylinder_trace_gamma0_pc(x, 1.0, de).trace_gamma0 / cylinder_trace_gamma0_pc(x, 1.0).trace_gamma0, 1.0,
                1e-8);
}

TEST(CylinderClosedForm, Domain) {
  EXPECT_THROW(cylinder_potential_pc(1.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(cylinder_potential_pc(-0.1, 1.0, 1.0), DomainError);
}

TEST(CylinderClosedForm, MatchesVoxelAnnularCavity) {
  using namespace casimir::born;
  VoxelizeOptions opt;
  opt.max_cells = 50000;
  ScatteringSolver s(voxelize(AnnularCylinderShape{1.0, 3.0, 10.0}, 20, Material::perfect_conductor(), opt));
  const double tr = s.gamma(Vec3::Zero(), 0.0, KernelKind::nonretarded).value.trace().real();
  EXPECT_NEAR(tr / cylinder_trace_gamma0_pc(0.0, 1.0).trace_gamma0, 1.0, 0.10);
}

TEST(CorrectionRatios, GeometryConstants) {
  const auto s = geometry_constants({GeometryTag::sphere_external, 2.0, 8.0});
  EXPECT_EQ(s.c_retard, -1.0 / 3.0);
  EXPECT_EQ(s.c_refl, 0.25);
  const auto p = geometry_constants({GeometryTag::plate, 0.0, 8.0});
  EXPECT_EQ(p.c_retard, 0.0);
  EXPECT_EQ(p.c_refl, 6.0);
  const auto c = geometry_constants({GeometryTag::spherical_cavity, 10.0, 2.0});
  EXPECT_EQ(c.c_retard, 3.0 / 5.0);
  EXPECT_EQ(c.c_refl, 3.0);
  EXPECT_THROW(geometry_constants({GeometryTag::cylindrical_cavity, 10.0, 2.0}), DomainError);
}

TEST(CorrectionRatios, SphericalCavityExample) {
  // k_B T / hbar w = 10 and z w / c = 0.01 give (3/5) * 10 * 1e-4.
  const double hw = 0.01;
  const double T = 10.0 * hw / units::k_B;
  const double z = 0.01 * units::hbar_c / hw;
  const auto r = correction_ratios({GeometryTag::spherical_cavity, 2.0 * z, z}, hw, T, Material::perfect_conductor());
  EXPECT_NEAR(r.retardation, 6e-4, 1e-15);
  EXPECT_EQ(r.reflectivity, 0.0);
  EXPECT_EQ(r.total, r.retardation);
}

TEST(CorrectionRatios, PlateAndPointSphere) {
  const auto drude = Material::drude(9.0, 0.035);
  const auto plate = correction_ratios({GeometryTag::plate, 0.0, 100.0}, 0.1, 300.0, drude);
  EXPECT_EQ(plate.retardation, 0.0);
  EXPECT_LT(plate.reflectivity, 0.0);
  double prev = INFINITY;
  for (double R : {10.0, 1.0, 0.1}) {
    const auto r = correction_ratios({GeometryTag::sphere_external, R, 100.0}, 0.1, 300.0, drude);
    EXPECT_LT(std::abs(r.reflectivity), prev);
    prev = std::abs(r.reflectivity);
  }
  EXPECT_THROW(correction_ratios({GeometryTag::plate, 0.0, 1.0}, 0.0, 300.0, drude), DomainError);
}

}  // namespace
