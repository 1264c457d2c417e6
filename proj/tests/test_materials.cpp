#include <cmath>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include <casimir/materials.hpp>

namespace {

using namespace casimir;

const Material gold = Material::drude(9.0, 0.035);

TEST(Materials, DrudeImaginaryAxis) {
  // 1 + 81 / (1 * 1.035)
  EXPECT_NEAR(gold.permittivity(cplx(0.0, 1.0)).eps.real(), 1.0 + 81.0 / 1.035, 1e-12);
  EXPECT_NEAR(gold.permittivity(cplx(0.0, 1.0)).eps.real(), 79.26, 0.01);
  EXPECT_EQ(gold.permittivity(cplx(0.0, 1.0)).eps.imag(), 0.0);
  EXPECT_NEAR(gold.permittivity(cplx(0.0, 1e8)).eps.real(), 1.0, 1e-12);
}

TEST(Materials, LosslessDrudeZeroAtPlasmaFrequency) {
  const auto m = Material::drude(9.0, 1e-12);
  EXPECT_NEAR(std::abs(m.permittivity(9.0).eps), 0.0, 1e-10);
}

TEST(Materials, BornStrength) {
  EXPECT_EQ(Material::perfect_conductor().born_strength(0.3), cplx(3.0));
  EXPECT_EQ(Material::perfect_conductor().born_strength(cplx(0.0, 2.0)), cplx(3.0));
  EXPECT_EQ(gold.born_strength(0.0), cplx(3.0));
  EXPECT_EQ(gold.static_born_strength(), cplx(3.0));
  const double eps = 1.0 + 81.0 / 1.035, chi = eps - 1.0;
  EXPECT_NEAR(gold.born_strength(cplx(0.0, 1.0)).real(), chi / (1.0 + chi / 3.0), 1e-12);
  EXPECT_NEAR(gold.born_strength(cplx(0.0, 1.0)).real(), 2.889, 1e-3);
  // Direct chi/(1 + chi/3) on the real axis.
  const cplx e = gold.permittivity(0.7).eps;
  EXPECT_NEAR(std::abs(gold.born_strength(0.7) - (e - 1.0) / (1.0 + (e - 1.0) / 3.0)), 0.0, 1e-12);
}

TEST(Materials, SchwarzReflection) {
  for (double w : {0.01, 0.3, 2.0, 12.0}) {
    EXPECT_NEAR(std::abs(gold.permittivity(-w).eps - std::conj(gold.permittivity(w).eps)), 0.0, 1e-9 * std::abs(gold.permittivity(w).eps));
  }
}

TEST(Materials, ImaginaryAxisMonotone) {
  double pe = INFINITY, pu = 3.0;
  for (double xi = 1e-3; xi < 100.0; xi *= 1.3) {
    const double e = gold.permittivity(cplx(0.0, xi)).eps.real(), u = gold.born_strength(cplx(0.0, xi)).real();
    EXPECT_LT(e, pe);
    EXPECT_LT(u, pu);
    EXPECT_GE(u, 0.0);
    EXPECT_GE(e, 1.0);
    pe = e;
    pu = u;
  }
}

TEST(Materials, Errors) {
  EXPECT_THROW(gold.permittivity(0.0), StaticDivergenceError);
  EXPECT_THROW(gold.permittivity(cplx(0.0, -1.0)), DomainError);
  EXPECT_THROW(Material::drude(0.0, 0.1), DomainError);
  EXPECT_THROW(Material::drude(9.0, -0.1), DomainError);
  EXPECT_TRUE(Material::perfect_conductor().permittivity(1.0).infinite);
}

TEST(Materials, SurfaceFactorLimits) {
  // gamma -> 0 gives |w|/wp; w << gamma gives sqrt(gamma |w| / 2)/wp.
  const auto clean = Material::drude(9.0, 1e-9);
  EXPECT_NEAR(clean.drude_surface_factor(0.09).approx, 0.09 / 9.0, 1e-9);
  const double w = 1e-6;
  EXPECT_NEAR(gold.drude_surface_factor(w).approx / (std::sqrt(0.035 * w / 2.0) / 9.0), 1.0, 1e-4);
  EXPECT_EQ(gold.drude_surface_factor(0.0).approx, 0.0);
  EXPECT_EQ(Material::perfect_conductor().drude_surface_factor(0.1).approx, 0.0);
}

TEST(Materials, SurfaceFactorApproximationWithinOnePercent) {
  for (double w : {1e-5, 1e-4, 1e-3, 0.01, 0.05, 0.09}) {
    for (double g : {1e-4, 0.01, 0.035, 0.09}) {
      const auto m = Material::drude(9.0, g);
      const auto s = m.drude_surface_factor(w);
      EXPECT_NEAR(s.approx / s.exact, 1.0, 0.01) << "w=" << w << " g=" << g;
    }
  }
}

TEST(Materials, TabulatedImaginaryAxis) {
  const auto m = load_permittivity_table(CASIMIR_TEST_DATA_DIR "/imag_axis.txt");
  EXPECT_TRUE(m.is_tabulated());
  EXPECT_NEAR(m.permittivity(cplx(0.0, 0.1)).eps.real(), 800.0, 1e-12);
  const auto mid = m.permittivity(cplx(0.0, 0.5));
  EXPECT_LT(mid.eps.real(), 800.0);
  EXPECT_GT(mid.eps.real(), 80.0);
  EXPECT_FALSE(mid.extrapolated);
  const auto far = m.permittivity(cplx(0.0, 100.0));
  EXPECT_TRUE(far.extrapolated);
  EXPECT_NEAR(far.eps.real(), 1.8, 1e-12);
  EXPECT_NEAR(m.static_born_strength().real(), 3.0 * 8999.0 / 9002.0, 1e-12);
}

TEST(Materials, TabulatedRealAxis) {
  const auto m = load_permittivity_table(CASIMIR_TEST_DATA_DIR "/real_axis.txt");
  EXPECT_NEAR(std::abs(m.permittivity(1.0).eps - cplx(-80.0, 8.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(m.permittivity(-1.0).eps - cplx(-80.0, -8.0)), 0.0, 1e-12);
  EXPECT_THROW(m.permittivity(cplx(0.0, 1.0)), DomainError);
}

TEST(Materials, TabulatedRejectsBadData) {
  const std::string path = ::testing::TempDir() + "bad_table.txt";
  {
    std::ofstream(path) << "1.0 0.5\n";  // eps(i xi) < 1
  }
  EXPECT_THROW(load_permittivity_table(path), ValidationError);
  {
    std::ofstream(path) << "2.0 5\n1.0 6\n";  // not increasing
  }
  EXPECT_THROW(load_permittivity_table(path), Error);
  EXPECT_THROW(load_permittivity_table(path + ".missing"), ValidationError);
}

}  // namespace
