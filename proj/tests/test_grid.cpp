#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rieffel/experiment.hpp"
#include "rieffel/fourier.hpp"
#include "rieffel/grid.hpp"
#include "rieffel/rng.hpp"

namespace rieffel {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(TorusGrid, InvariantsAndRejection) {
  TorusGrid grid(2, 32, 12.8);
  EXPECT_EQ(grid.point_count(), 1024);
  EXPECT_NEAR(grid.spacing(), 0.4, 1e-15);
  EXPECT_NEAR(grid.coord(0), -6.4, 1e-15);
  EXPECT_NEAR(grid.freq(1), 2.0 * kPi / 12.8, 1e-15);
  EXPECT_EQ(grid.centered_mode(31), -1);
  EXPECT_THROW(TorusGrid(1, 48, 10.0), std::invalid_argument);
  EXPECT_THROW(TorusGrid(1, 64, -1.0), std::invalid_argument);
}

TEST(SkewForm, ConstructionEnforcesAntisymmetry) {
  SkewForm j = SkewForm::standard(2, 0.5);
  EXPECT_EQ(j.entries()(0, 1), 0.5);
  EXPECT_EQ(j.entries()(1, 0), -0.5);
  EXPECT_TRUE((j.entries() + j.entries().transpose()).isZero(0.0));
  Eigen::MatrixXd bad(2, 2);
  bad << 0, 1, 1, 0;
  EXPECT_THROW(SkewForm(2, bad), std::invalid_argument);
  EXPECT_TRUE(SkewForm::standard(1, 2.0).is_zero());
}

TEST(Sample, ConstantFunctionAndVolume) {
  TorusGrid grid(1, 64, 8.0);
  GridFunction one = sample_scalar([](std::span<const double>) { return Complex(1, 0); }, grid, 2);
  MatrixElement ip = inner_product_E(one, one);
  EXPECT_NEAR(cstar_norm(ip - MatrixElement::scalar(2, 8.0)), 0.0, 1e-12);
  EXPECT_NEAR(norm_E(one), std::sqrt(8.0), 1e-12);
}

TEST(Sample, GaussianMatchesClosureAtNodes) {
  TorusGrid grid(1, 64, 20.0);
  auto fn = [](std::span<const double> x) { return Complex(std::exp(-0.5 * x[0] * x[0]), 0); };
  GridFunction f = sample_scalar(fn, grid, 1);
  for (std::int64_t m = 0; m < grid.point_count(); m += 7) {
    double x = grid.point(m)[0];
    EXPECT_EQ(*f.at(m), Complex(std::exp(-0.5 * x * x), 0));
  }
}

TEST(Sample, LatticePlaneWaveIsSeamlessAcrossTheBoundary) {
  TorusGrid grid(1, 128, 10.0);
  std::vector<int> mode = {3};
  GridFunction w = plane_wave(grid, 1, mode);
  // Periodic continuation: the value at -L/2 equals the limit from +L/2.
  double xi = grid.freq_step() * 3;
  Complex from_right = std::exp(Complex(0, xi * (grid.length() / 2.0)));
  EXPECT_NEAR(std::abs(*w.at(0) - from_right), 0.0, 1e-12);
}

TEST(Sample, RejectsNonFiniteValuesNamingThePoint) {
  TorusGrid grid(1, 16, 4.0);
  auto bad = [](std::span<const double> x) {
    return Complex(x[0] == -2.0 ? std::nan("") : 1.0, 0);
  };
  try {
    sample_scalar(bad, grid, 1);
    FAIL() << "expected domain_error";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("-2"), std::string::npos);
  }
}

TEST(InnerProduct, PlaneWaveOrthogonalityAndSymmetry) {
  TorusGrid grid(1, 64, 8.0);
  std::vector<int> ma = {2}, mb = {5};
  GridFunction ea = plane_wave(grid, 1, ma);
  GridFunction eb = plane_wave(grid, 1, mb);
  EXPECT_NEAR(cstar_norm(inner_product_E(ea, eb)), 0.0, 1e-12);
  // Riemann-sum exactness on lattice characters: <e_a, e_a> = L.
  EXPECT_NEAR(cstar_norm(inner_product_E(ea, ea) - MatrixElement::scalar(1, 8.0)), 0.0, 1e-12);

  Rng rng(5);
  TorusGrid g2(2, 8, 6.4);
  GridFunction f = fourier_inv(random_band_limited(g2, 2, 2, rng));
  GridFunction g = fourier_inv(random_band_limited(g2, 2, 2, rng));
  MatrixElement lhs = adjoint(inner_product_E(f, g));
  MatrixElement rhs = inner_product_E(g, f);
  EXPECT_NEAR(cstar_norm(lhs - rhs), 0.0, 1e-13);
}

TEST(Norms, ZeroScalarAndDiagonalExamples) {
  TorusGrid grid(1, 128, 20.0);
  GridFunction zero(grid, 2, Space::position);
  EXPECT_EQ(norm_E(zero), 0.0);
  EXPECT_EQ(norm_L2(zero), 0.0);

  // Scalar case: the two norms coincide.
  Rng rng(6);
  GridFunction f = fourier_inv(random_band_limited(grid, 1, 10, rng));
  EXPECT_NEAR(norm_E(f), norm_L2(f), 1e-12);

  // f = diag(phi, 0): norm_E picks the L2 norm of phi.
  auto phi = [](double x) { return std::exp(-0.5 * x * x); };
  GridFunction diag = sample(
      [&](std::span<const double> x) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
        m(0, 0) = phi(x[0]);
        return MatrixElement(m);
      },
      grid);
  // Closed form: ||e^{-x^2/2}||_{L2}^2 = sqrt(pi).
  EXPECT_NEAR(norm_E(diag), std::pow(kPi, 0.25), 1e-12);
  EXPECT_NEAR(norm_L2(diag), std::pow(kPi, 0.25), 1e-12);
}

TEST(Norms, ModuleNormIsDominatedByL2Norm) {
  Rng rng(7);
  TorusGrid grid(2, 8, 6.4);
  for (int t = 0; t < 25; ++t) {
    GridFunction f = fourier_inv(random_band_limited(grid, 2, 3, rng));
    EXPECT_LE(norm_E(f), norm_L2(f) * (1.0 + 1e-12));
  }
}

TEST(Norms, CauchySchwarzForTheModulePairing) {
  Rng rng(8);
  TorusGrid grid(1, 64, 8.0);
  for (int t = 0; t < 25; ++t) {
    GridFunction f = fourier_inv(random_band_limited(grid, 2, 6, rng));
    GridFunction g = fourier_inv(random_band_limited(grid, 2, 6, rng));
    double pairing = cstar_norm(inner_product_E(f, g));
    EXPECT_LE(pairing, norm_E(f) * norm_L2(g) + 1e-10);
    EXPECT_LE(pairing, norm_L2(f) * norm_L2(g) + 1e-10);
  }
}

TEST(Seminorms, SupNormAndGaussianDerivative) {
  // L = 16, N = 256 puts x = 1 on the lattice, where |d/dx e^{-x^2/2}| peaks.
  TorusGrid grid(1, 256, 16.0);
  GridFunction f = sample_scalar(
      [](std::span<const double> x) { return Complex(std::exp(-0.5 * x[0] * x[0]), 0); }, grid, 1);
  std::vector<int> zero = {0}, one = {1};
  SeminormResult sup = seminorm_p(f, zero, zero);
  EXPECT_NEAR(sup.value, 1.0, 1e-13);
  EXPECT_FALSE(sup.aliasing_warning);
  SeminormResult d1 = seminorm_p(f, zero, one);
  EXPECT_NEAR(d1.value, std::exp(-0.5), 1e-11);
}

TEST(Seminorms, MonomialWeightGrowthMatchesDirectEvaluation) {
  TorusGrid grid(1, 256, 16.0);
  GridFunction f = sample_scalar(
      [](std::span<const double> x) { return Complex(std::exp(-0.5 * x[0] * x[0]), 0); }, grid, 1);
  for (int a = 1; a <= 4; ++a) {
    std::vector<int> alpha = {a}, beta = {0};
    double direct = 0.0;
    for (std::int64_t m = 0; m < grid.point_count(); ++m) {
      double x = grid.point(m)[0];
      direct = std::max(direct, std::abs(std::pow(x, a) * std::exp(-0.5 * x * x)));
    }
    EXPECT_NEAR(seminorm_p(f, alpha, beta).value, direct, 1e-12 * (1.0 + direct));
  }
}

TEST(Seminorms, DerivativeOrderCapAndAliasingWarning) {
  TorusGrid grid(1, 64, 8.0);
  GridFunction f = sample_scalar(
      [](std::span<const double> x) { return Complex(std::exp(-0.5 * x[0] * x[0]), 0); }, grid, 1);
  std::vector<int> zero = {0}, five = {5};
  EXPECT_THROW(seminorm_p(f, zero, five), std::invalid_argument);

  // A wave in the top third of the band trips the aliasing diagnostic.
  std::vector<int> high_mode = {28};
  GridFunction w = plane_wave(grid, 1, high_mode);
  std::vector<int> one = {1};
  EXPECT_TRUE(seminorm_p(w, zero, one).aliasing_warning);
}

TEST(Seminorms, QFamilyExamples) {
  TorusGrid grid(1, 256, 16.0);
  GridFunction f = sample_scalar(
      [](std::span<const double> x) { return Complex(std::exp(-0.5 * x[0] * x[0]), 0); }, grid, 1);
  SeminormResult q00 = seminorm_q(f, 0, 0);
  EXPECT_NEAR(q00.value, norm_E(f), 1e-13);
  // Gaussian moments: ||f||^2 = sqrt(pi), ||x f||^2 = sqrt(pi)/2.
  SeminormResult q10 = seminorm_q(f, 1, 0);
  EXPECT_NEAR(q10.value * q10.value, std::sqrt(kPi) * 1.5, 1e-12);
  // Monotone in the first index.
  SeminormResult q20 = seminorm_q(f, 2, 0);
  EXPECT_GE(q20.value, q10.value);
}

}  // namespace
}  // namespace rieffel
