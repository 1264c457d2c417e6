#include <cmath>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include <casimir/born/kernel.hpp>
#include <casimir/born/newell.hpp>
#include <casimir/born/scattering.hpp>
#include <casimir/born/voxel_body.hpp>
#include <casimir/closed_forms.hpp>

namespace {

using namespace casimir;
using namespace casimir::born;

const double pi = units::pi;

// Retarded kernel straight from its closed form (no series, no remainder split).
Mat3c direct_kernel(const Vec3& rho, cplx k) {
  const double r = rho.norm();
  const Vec3 e = rho / r;
  const cplx i(0.0, 1.0), x = k * r;
  const cplx pre = -std::exp(i * x) / (4.0 * pi * r * r * r);
  return pre * ((1.0 - i * x - x * x) * Mat3c::Identity() - (3.0 - 3.0 * i * x - x * x) * (e * e.transpose()).cast<cplx>());
}

double rel(const Mat3c& a, const Mat3c& b) { return (a - b).norm() / b.norm(); }
double rel(const Mat3& a, const Mat3& b) { return (a - b).norm() / b.norm(); }

VoxelBody single_cell(const Material& m, double volume) {
  return VoxelBody({Cell{Vec3::Zero(), volume, 1.0, 0}}, {m}, "single");
}

TEST(Kernel, StaticAlongX) {
  const double r = 2.5;
  const Mat3c a = kernel_A(Vec3(r, 0, 0), 0.0, KernelKind::nonretarded);
  const Mat3c expect = Eigen::Vector3d(2, -1, -1).asDiagonal().toDenseMatrix().cast<cplx>() / (4.0 * pi * r * r * r);
  EXPECT_LT(rel(a, expect), 1e-15);
  EXPECT_LT(rel(kernel_A(Vec3(r, 0, 0), 0.0, KernelKind::retarded), expect), 1e-15);
}

TEST(Kernel, StaticIsTraceless) {
  for (const Vec3& v : {Vec3(1, 2, 3), Vec3(-0.3, 0.1, 7), Vec3(0, 0, 1e-3)})
    EXPECT_NEAR(std::abs(kernel_A(v, 0.0, KernelKind::nonretarded).trace()), 0.0, 1e-12 / std::pow(v.norm(), 3));
}

TEST(Kernel, RetardedCloseToStaticAtSmallKRho) {
  const Vec3 rho(0.0, 3.0, 4.0);
  const double k = 0.01 / rho.norm();
  const double d = rel(kernel_A(rho, k, KernelKind::retarded), kernel_A(rho, k, KernelKind::nonretarded));
  EXPECT_LT(d, 2e-4);
  EXPECT_GT(d, 1e-5);
}

TEST(Kernel, MatchesClosedFormAcrossSeriesSwitch) {
  const Vec3 rho(1.0, -2.0, 0.5);
  for (double kr : {1e-3, 0.1, 0.49, 0.51, 2.0, 20.0}) {
    for (cplx dir : {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0.6, 0.8)}) {
      const cplx k = dir * kr / rho.norm();
      // Static part plus remainder: absolute error is bounded by the static kernel's size.
      const double scale = kernel_A(rho, 0.0, KernelKind::nonretarded).norm();
      EXPECT_LT((kernel_A(rho, k, KernelKind::retarded) - direct_kernel(rho, k)).norm(), 1e-13 * scale) << "k rho=" << kr;
    }
  }
}

TEST(Kernel, RemainderIsAccurateAtTinyKRho) {
  // A_ret - A_static ~ k^2 (I + e e)/(8 pi rho) for k rho -> 0.
  const Vec3 rho(0.0, 0.0, 2.0);
  const double k = 1e-6;
  const Mat3 e = Vec3(0, 0, 1) * Vec3(0, 0, 1).transpose();
  const Mat3 lead = k * k * (Mat3::Identity() + e) / (8.0 * pi * 2.0);
  EXPECT_LT(rel(Mat3(retarded_remainder(rho, k).real()), lead), 1e-9);
}

TEST(Kernel, ZeroSeparationThrows) {
  EXPECT_THROW(kernel_A(Vec3::Zero(), 0.1, KernelKind::retarded), DomainError);
}

TEST(Newell, SelfTensorIsIsotropicWithUnitTrace) {
  const Eigen::Matrix3d n = newell_tensor(0, 0, 0);
  EXPECT_NEAR(n.trace(), 1.0, 1e-12);
  EXPECT_NEAR(n(0, 0), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(n(0, 1), 0.0, 1e-12);
}

TEST(Newell, AveragedKernelApproachesPointKernel) {
  const double h = 2.0;
  for (int d : {3, 6}) {
    const Mat3 avg = averaged_static_kernel(d, 1, 0, h);
    const Mat3 pt = static_kernel(Vec3(d * h, h, 0));
    EXPECT_LT(rel(avg, pt), d == 6 ? 2e-3 : 1e-2);
    EXPECT_NEAR(avg.trace(), 0.0, 1e-10 * avg.norm());
  }
}

TEST(Scattering, SingleVoxelStatic) {
  // One Born term: c A(d) A(d) = c (I + 3 e e)/(16 pi^2 d^6), trace 3c/(8 pi^2 d^6).
  const double V = 0.2, d = 5.0;
  ScatteringSolver s(single_cell(Material::perfect_conductor(), V));
  const Mat3c g = s.gamma(Vec3(0, 0, d), 0.0, KernelKind::nonretarded).value;
  const double c = 3.0 * V;
  Mat3 expect = Mat3::Identity();
  expect(2, 2) = 4.0;
  expect *= c / (16.0 * pi * pi * std::pow(d, 6));
  EXPECT_LT(rel(Mat3(g.real()), expect), 1e-13);
  EXPECT_NEAR(g.trace().real(), 3.0 * c / (8.0 * pi * pi * std::pow(d, 6)), 1e-13 * std::abs(g.trace()));
}

TEST(Scattering, SingleVoxelSecondDerivative) {
  // d^2/dk^2 of c A(k)^2 at k = 0 with A ~ A0 + k^2 (I + e e)/(8 pi rho): c diag(-1,-1,4)/(8 pi^2 d^4) per k^2.
  const double V = 0.2, d = 5.0, c = 3.0 * V;
  ScatteringSolver s(single_cell(Material::perfect_conductor(), V));
  const auto fd = s.frequency_derivatives(Vec3(0, 0, d));
  Mat3 expect = Mat3::Zero();
  expect.diagonal() << -1.0, -1.0, 4.0;
  expect *= c / (8.0 * pi * pi * std::pow(d, 4) * units::hbar_c * units::hbar_c);
  EXPECT_LT(rel(fd.gamma0_dd, expect), 1e-4);
}

TEST(Scattering, EmptyBodyGivesZero) {
  ScatteringSolver s(VoxelBody{});
  EXPECT_EQ(s.gamma(Vec3(0, 0, 1), 0.1, KernelKind::retarded).value.norm(), 0.0);
}

TEST(Scattering, EvenInFrequencyWithFrozenResponse) {
  const auto body = voxelize(SphereShape{10.0}, 6, Material::perfect_conductor());
  ScatteringSolver s(body);
  const Vec3 r(0, 0, 25.0);
  const double k = 0.02;
  const Mat3c gp = s.gamma_with_strengths({r}, k, KernelKind::retarded, {3.0})[0];
  const Mat3c gm = s.gamma_with_strengths({r}, -k, KernelKind::retarded, {3.0})[0];
  EXPECT_LT((gp.real() - gm.real()).norm(), 1e-12 * gp.norm());
  EXPECT_LT((gp.imag() + gm.imag()).norm(), 1e-12 * gp.norm());
}

TEST(Scattering, ScalingOfStaticTensorAndSecondDerivative) {
  const double lambda = 3.0;
  ScatteringSolver a(voxelize(SphereShape{10.0}, 6, Material::perfect_conductor()));
  ScatteringSolver b(voxelize(SphereShape{10.0 * lambda}, 6, Material::perfect_conductor()));
  const auto fa = a.frequency_derivatives(Vec3(0, 0, 20.0));
  const auto fb = b.frequency_derivatives(Vec3(0, 0, 20.0 * lambda));
  EXPECT_LT(rel(Mat3(fb.gamma0 * std::pow(lambda, 3)), fa.gamma0), 1e-10);
  EXPECT_LT(rel(Mat3(fb.gamma0_dd * lambda), fa.gamma0_dd), 1e-4);
}

TEST(Scattering, SymmetricTensors) {
  const auto body = voxelize(SphereShape{10.0}, 8, Material::drude(9.0, 0.035));
  ScatteringSolver s(body);
  const Vec3 r(3.0, -4.0, 22.0);
  for (cplx hw : {cplx(0.0), cplx(0.5), cplx(0.0, 2.0), cplx(3.0)}) {
    for (auto kind : {KernelKind::retarded, KernelKind::nonretarded}) {
      const Mat3c g = s.gamma(r, hw, kind).value;
      EXPECT_LT((g - g.transpose()).norm(), 1e-8 * g.norm());
    }
  }
}

TEST(Scattering, ImaginaryFrequencyIsReal) {
  const auto body = voxelize(SphereShape{10.0}, 8, Material::drude(9.0, 0.035));
  ScatteringSolver s(body);
  const Mat3c g = s.gamma(Vec3(0, 0, 20), cplx(0.0, 1.5), KernelKind::retarded).value;
  EXPECT_LT(g.imag().norm(), 1e-12 * g.norm());
}

TEST(Scattering, BornSeriesMatchesDirectSolveForDiluteBody) {
  const auto body = voxelize(SphereShape{10.0}, 8, Material::perfect_conductor());
  SolverOptions series;
  series.method = Method::born_series;
  ScatteringSolver direct(body), born(body, series);
  const Vec3 r(0, 0, 18.0);
  for (double k : {0.0, 0.05}) {
    const auto kind = k == 0.0 ? KernelKind::nonretarded : KernelKind::retarded;
    const Mat3c a = direct.gamma_with_strengths({r}, k, kind, {0.5})[0];
    const Mat3c b = born.gamma_with_strengths({r}, k, kind, {0.5})[0];
    EXPECT_LT(rel(b, a), 1e-6);
  }
}

TEST(Scattering, DenseAndIterativeAgree) {
  const auto body = voxelize(SphereShape{10.0}, 10, Material::drude(9.0, 0.035));
  SolverOptions dense, iterative;
  dense.dense_max_cells = 100000;
  iterative.dense_max_cells = 0;
  ScatteringSolver a(body, dense), b(body, iterative);
  const Vec3 r(0, 0, 25.0);
  for (cplx hw : {cplx(0.0), cplx(0.0, 1.0), cplx(2.0)}) {
    EXPECT_LT(rel(b.gamma(r, hw, KernelKind::retarded).value, a.gamma(r, hw, KernelKind::retarded).value), 1e-8);
  }
}

TEST(Scattering, FftAndPairwiseMatvecAgree) {
  const auto body = voxelize(SphereShape{10.0}, 10, Material::drude(9.0, 0.035));
  SolverOptions fft, pair;
  fft.dense_max_cells = pair.dense_max_cells = 0;
  fft.coupling.matvec = MatvecMode::fft;
  pair.coupling.matvec = MatvecMode::pairwise;
  ScatteringSolver a(body, fft), b(body, pair);
  const Vec3 r(0, 0, 25.0);
  EXPECT_LT(rel(a.gamma(r, 1.0, KernelKind::retarded).value, b.gamma(r, 1.0, KernelKind::retarded).value), 1e-9);
}

TEST(Scattering, PecSphereMatchesClosedFormAtResolution20) {
  const double R = 10.0;
  ScatteringSolver s(voxelize(SphereShape{R}, 20, Material::perfect_conductor()));
  const double tr = s.gamma(Vec3(0, 0, 4 * R), 0.0, KernelKind::nonretarded).value.trace().real();
  EXPECT_NEAR(tr / closed_forms::sphere_trace_gamma0_pc(4 * R, R), 1.0, 0.03);
  EXPECT_GT(tr, 0.0);
}

TEST(Scattering, PecNonretardedIsFrequencyFlat) {
  ScatteringSolver s(voxelize(SphereShape{10.0}, 8, Material::perfect_conductor()));
  const Vec3 r(0, 0, 20);
  const Mat3c g0 = s.gamma(r, 0.0, KernelKind::nonretarded).value;
  for (cplx hw : {cplx(0.01), cplx(3.0), cplx(0.0, 0.7)})
    EXPECT_EQ((s.gamma(r, hw, KernelKind::nonretarded).value - g0).norm(), 0.0);
}

TEST(Scattering, DrudeNonretardedApproachesStaticAsXiVanishes) {
  ScatteringSolver s(voxelize(SphereShape{10.0}, 8, Material::drude(9.0, 0.035)));
  const Vec3 r(0, 0, 20);
  const Mat3c g0 = s.gamma(r, 0.0, KernelKind::nonretarded).value;
  double prev = INFINITY;
  for (double xi : {1.0, 0.1, 0.01, 0.001}) {
    const double d = rel(s.gamma(r, cplx(0.0, xi), KernelKind::nonretarded).value, g0);
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Scattering, PointInsideBodyIsRejected) {
  ScatteringSolver s(voxelize(SphereShape{10.0}, 8, Material::perfect_conductor()));
  EXPECT_THROW(s.gamma(Vec3(0, 0, 5), 0.0, KernelKind::nonretarded), DomainError);
}

TEST(Scattering, MemoisesRepeatedQueries) {
  ScatteringSolver s(voxelize(SphereShape{10.0}, 6, Material::drude(9.0, 0.035)));
  const Vec3 r(0, 0, 20);
  s.gamma(r, cplx(0.0, 0.3), KernelKind::retarded);
  const auto n = s.cache_size();
  s.gamma(r, cplx(0.0, 0.3), KernelKind::retarded);
  EXPECT_EQ(s.cache_size(), n);
}

TEST(Voxelize, VolumesWithinFivePercent) {
  const auto pec = Material::perfect_conductor();
  const auto sphere = voxelize(SphereShape{10.0}, 20, pec);
  EXPECT_NEAR(sphere.occupied_volume() / (4.0 / 3.0 * pi * 1000.0), 1.0, 0.05);
  const AnnularCylinderShape cyl{5.0, 15.0, 40.0};
  const auto c = voxelize(cyl, 20, pec);
  EXPECT_NEAR(c.occupied_volume() / (pi * (225.0 - 25.0) * 40.0), 1.0, 0.05);
  VoxelizeOptions centre;
  centre.fill = FillRule::center;
  EXPECT_NEAR(voxelize(SphereShape{10.0}, 20, pec, centre).occupied_volume() / (4.0 / 3.0 * pi * 1000.0), 1.0, 0.05);
}

TEST(Voxelize, RefinementReducesVolumeError) {
  VoxelizeOptions centre;
  centre.fill = FillRule::center;
  auto err = [&](int n) {
    return std::abs(voxelize(SphereShape{10.0}, n, Material::perfect_conductor(), centre).occupied_volume() /
                        (4.0 / 3.0 * pi * 1000.0) -
                    1.0);
  };
  EXPECT_LT(err(16), err(8));
  EXPECT_LT(err(32), err(16));
}

TEST(Voxelize, DeterministicAndBounded) {
  const auto a = voxelize(SphereShape{10.0}, 10, Material::perfect_conductor());
  const auto b = voxelize(SphereShape{10.0}, 10, Material::perfect_conductor());
  EXPECT_EQ(a.hash(), b.hash());
  VoxelizeOptions small;
  small.max_cells = 100;
  EXPECT_THROW(voxelize(SphereShape{10.0}, 20, Material::perfect_conductor(), small), ResourceError);
  EXPECT_THROW(voxelize(SphereShape{-1.0}, 10, Material::perfect_conductor()), DomainError);
}

TEST(Voxelize, UnionOfSpheres) {
  auto u = std::make_shared<UnionShape>();
  u->parts.push_back({SphereShape{5.0}, Vec3(-10, 0, 0)});
  u->parts.push_back({SphereShape{5.0}, Vec3(10, 0, 0)});
  const auto body = voxelize(Shape{u}, 24, Material::perfect_conductor());
  EXPECT_NEAR(body.occupied_volume() / (2.0 * 4.0 / 3.0 * pi * 125.0), 1.0, 0.05);
  EXPECT_THROW(body.check_outside(Vec3(10, 0, 0)), DomainError);
  EXPECT_NO_THROW(body.check_outside(Vec3(0, 0, 0)));
}

}  // namespace
