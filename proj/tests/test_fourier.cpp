#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rieffel/experiment.hpp"
#include "rieffel/fourier.hpp"
#include "rieffel/rng.hpp"

namespace rieffel {
namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.raw().size(); ++i)
    worst = std::max(worst, std::abs(a.raw()[i] - b.raw()[i]));
  return worst;
}

TEST(Fourier, MatchesDirectSummationOracle) {
  Rng rng(11);
  for (int n : {1, 2}) {
    TorusGrid grid(n, n == 1 ? 32 : 8, 7.3);
    GridFunction f = fourier_inv(random_band_limited(grid, 2, 3, rng));
    EXPECT_LT(max_abs_diff(fourier(f), oracles::dft_forward(f)), 1e-12);
    GridFunction g = random_band_limited(grid, 2, 3, rng);
    EXPECT_LT(max_abs_diff(fourier_inv(g), oracles::dft_inverse(g)), 1e-12);
  }
}

TEST(Fourier, RoundTripIsExactOnTheLattice) {
  Rng rng(12);
  TorusGrid grid(2, 16, 9.7);
  GridFunction f = fourier_inv(random_band_limited(grid, 2, 5, rng));
  EXPECT_LT(norm_E(fourier_inv(fourier(f)) - f), 1e-12);
}

TEST(Fourier, ConstantConcentratesAtZeroMode) {
  TorusGrid grid(1, 64, 8.0);
  GridFunction one = sample_scalar([](std::span<const double>) { return Complex(1, 0); }, grid, 2);
  GridFunction hat = fourier(one);
  double expected = std::pow(2.0 * kPi, -0.5) * 8.0;
  EXPECT_NEAR(cstar_norm(hat.value(0) - MatrixElement::scalar(2, expected)), 0.0, 1e-12);
  for (std::int64_t q = 1; q < grid.point_count(); ++q)
    EXPECT_LT(cstar_norm(hat.value(q)), 1e-12);
}

TEST(Fourier, PlaneWaveGivesASingleMode) {
  TorusGrid grid(1, 64, 8.0);
  std::vector<int> mode = {-5};
  GridFunction w = plane_wave(grid, 1, mode);
  GridFunction hat = fourier(w);
  GridFunction expected = plane_wave_spectrum(grid, 1, mode);
  EXPECT_LT(max_abs_diff(hat, expected), 1e-11);
}

TEST(Fourier, GaussianIsSelfDual) {
  // Under this convention F(e^{-x^2/2}) = e^{-xi^2/2}; the box is wide
  // enough that truncation sits below the tolerance.
  TorusGrid grid(1, 256, 24.0);
  GridFunction f = sample_scalar(
      [](std::span<const double> x) { return Complex(std::exp(-0.5 * x[0] * x[0]), 0); }, grid, 1);
  GridFunction hat = fourier(f);
  for (int q = 0; q < grid.samples(); ++q) {
    double xi = grid.freq(q);
    if (std::abs(xi) > 6.0) continue;
    Complex expect(std::exp(-0.5 * xi * xi), 0);
    EXPECT_NEAR(std::abs(*hat.at(q) - expect), 0.0, 1e-10 * std::abs(expect) + 1e-13);
  }
}

TEST(Fourier, InverseIsTheReflectedForwardTransform) {
  Rng rng(13);
  TorusGrid grid(1, 64, 11.0);
  GridFunction g = random_band_limited(grid, 1, 6, rng);
  EXPECT_LT(max_abs_diff(fourier_inv(g), oracles::dft_forward_reflected(g)), 1e-12);
}

TEST(Fourier, PlancherelIsometryAndAdjointness) {
  Rng rng(14);
  TorusGrid grid(2, 16, 9.0);
  for (int t = 0; t < 10; ++t) {
    GridFunction f = fourier_inv(random_band_limited(grid, 2, 4, rng));
    GridFunction g_hat = random_band_limited(grid, 2, 4, rng);
    EXPECT_NEAR(norm_E(fourier(f)), norm_E(f), 1e-12);
    MatrixElement lhs = inner_product_E(fourier(f), g_hat);
    MatrixElement rhs = inner_product_E(f, fourier_inv(g_hat));
    EXPECT_NEAR(cstar_norm(lhs - rhs), 0.0, 1e-12);
  }
}

TEST(Fourier, DerivativeIntertwining) {
  Rng rng(15);
  TorusGrid grid(1, 128, 12.0);
  GridFunction f = fourier_inv(random_band_limited(grid, 1, 9, rng));
  std::vector<int> beta = {1};
  GridFunction lhs = fourier(spectral_derivative(f, beta));
  GridFunction rhs = fourier(f);
  for (int q = 0; q < grid.samples(); ++q) *rhs.at(q) *= Complex(0, grid.freq(q));
  EXPECT_LT(norm_E(lhs - rhs), 1e-10);
}

TEST(Fourier, SpectralDerivativeOfGaussian) {
  TorusGrid grid(1, 256, 24.0);
  GridFunction f = sample_scalar(
      [](std::span<const double> x) { return Complex(std::exp(-0.5 * x[0] * x[0]), 0); }, grid, 1);
  std::vector<int> beta = {1};
  GridFunction df = spectral_derivative(f, beta);
  for (std::int64_t m = 0; m < grid.point_count(); m += 5) {
    double x = grid.point(m)[0];
    EXPECT_NEAR(std::abs(*df.at(m) - Complex(-x * std::exp(-0.5 * x * x), 0)), 0.0, 1e-10);
  }
}

TEST(Fourier, LinearOverMatrixCoefficientsOnBothSides) {
  Rng rng(16);
  TorusGrid grid(1, 32, 6.0);
  GridFunction f = fourier_inv(random_band_limited(grid, 2, 3, rng));
  Eigen::MatrixXcd cm(2, 2);
  cm << Complex(1, 2), Complex(0, -1), Complex(0.5, 0), Complex(-2, 1);
  GridFunction cf(grid, 2, Space::position), fc(grid, 2, Space::position);
  for (std::int64_t m = 0; m < grid.point_count(); ++m) {
    Eigen::MatrixXcd v = f.value(m).entries();
    cf.set_value(m, MatrixElement(cm * v));
    fc.set_value(m, MatrixElement(v * cm));
  }
  GridFunction hat = fourier(f);
  GridFunction lhs_left = fourier(cf), lhs_right = fourier(fc);
  for (std::int64_t q = 0; q < grid.point_count(); ++q) {
    Eigen::MatrixXcd hv = hat.value(q).entries();
    EXPECT_NEAR(cstar_norm(lhs_left.value(q) - MatrixElement(cm * hv)), 0.0, 1e-12);
    EXPECT_NEAR(cstar_norm(lhs_right.value(q) - MatrixElement(hv * cm)), 0.0, 1e-12);
  }
}

TEST(Fourier, WrongSpaceTagRejected) {
  TorusGrid grid(1, 16, 4.0);
  GridFunction pos(grid, 1, Space::position);
  GridFunction freq(grid, 1, Space::frequency);
  EXPECT_THROW(fourier(freq), std::invalid_argument);
  EXPECT_THROW(fourier_inv(pos), std::invalid_argument);
}

}  // namespace
}  // namespace rieffel
