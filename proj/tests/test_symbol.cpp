#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rieffel/experiment.hpp"
#include "rieffel/rng.hpp"
#include "rieffel/symbol.hpp"

namespace rieffel {
namespace {

constexpr double kPi = std::numbers::pi;

GridFunction rand_pos(const TorusGrid& grid, int k, int band, Rng& rng) {
  return fourier_inv(random_band_limited(grid, k, band, rng));
}

TEST(Symbol, IdentityHasConstantSymbolOne) {
  TorusGrid grid(1, 16, 6.0);
  PhaseSpaceFunction sym = extract_symbol(identity_op(grid, 2));
  MatrixElement one = MatrixElement::identity(2);
  for (std::int64_t m = 0; m < grid.point_count(); ++m)
    for (std::int64_t q = 0; q < grid.point_count(); ++q)
      EXPECT_NEAR(cstar_norm(sym.value(m, q) - one), 0.0, 1e-12);
}

TEST(Symbol, LeftMultSymbolIsTheTwistedShiftOfF) {
  Rng rng(71);
  TorusGrid grid(2, 16, 9.6);
  SkewForm j = SkewForm::standard(2, 0.5);
  GridFunction f_hat = random_band_limited(grid, 2, 3, rng);
  PhaseSpaceFunction sym = extract_symbol(op_left(f_hat, j));
  // Expected slice at mode q: f(x - J xi_q / (2 pi)), realized spectrally.
  // Only in-band modes are compared: once q + supp(F f) wraps past the
  // Nyquist edge the discrete symbol follows the aliased representative.
  std::vector<std::int64_t> modes;
  for (std::vector<int> cm : {std::vector<int>{0, 0}, {1, -2}, {-3, 4}, {4, 4}, {-4, -1}}) {
    int idx[2] = {grid.storage_index(cm[0]), grid.storage_index(cm[1])};
    modes.push_back(grid.encode(idx));
  }
  for (std::int64_t q : modes) {
    auto xi = grid.freq_point(q);
    std::vector<double> shift = j.apply(xi);
    GridFunction shifted_hat = f_hat;
    for (std::int64_t p = 0; p < grid.point_count(); ++p) {
      auto w = grid.freq_point(p);
      double dot = (w[0] * shift[0] + w[1] * shift[1]) / (2.0 * kPi);
      Complex phase = std::exp(Complex(0, -dot));
      for (int e = 0; e < 4; ++e) shifted_hat.at(p)[e] *= phase;
    }
    GridFunction expected = fourier_inv(shifted_hat);
    for (std::int64_t m = 0; m < grid.point_count(); m += 23)
      EXPECT_NEAR(cstar_norm(sym.value(m, q) - expected.value(m)), 0.0, 1e-12);
  }
}

TEST(Symbol, PointwiseMultiplierHasXiIndependentSymbol) {
  Rng rng(72);
  TorusGrid grid(1, 32, 8.0);
  SkewForm j0 = SkewForm::zero(1);
  GridFunction f = rand_pos(grid, 2, 4, rng);
  PhaseSpaceFunction sym = extract_symbol(op_left(fourier(f), j0));
  for (std::int64_t m = 0; m < grid.point_count(); m += 3)
    for (std::int64_t q = 0; q < grid.point_count(); q += 5)
      EXPECT_NEAR(cstar_norm(sym.value(m, q) - f.value(m)), 0.0, 1e-12);
}

TEST(Symbol, QuantizationReproducesTheOperator) {
  Rng rng(73);
  TorusGrid grid(1, 32, 8.0);
  SkewForm j0 = SkewForm::zero(1);
  std::vector<int> a = {3}, b = {-2};
  std::vector<GridOperator> ops = {
      op_left(random_band_limited(grid, 2, 4, rng), j0),
      heisenberg_op_steps(grid, 2, a, b, 0.4),
      rank_one_op(rand_pos(grid, 2, 4, rng), rand_pos(grid, 2, 4, rng))};
  for (const auto& op : ops) {
    PhaseSpaceFunction sym = extract_symbol(op);
    for (int t = 0; t < 3; ++t) {
      GridFunction g = rand_pos(grid, 2, 6, rng);
      EXPECT_LT(norm_E(apply_kohn_nirenberg(sym, g) - op.apply(g)) / norm_E(g), 1e-12);
    }
  }
}

TEST(Symbol, RestrictionExamples) {
  Rng rng(74);
  TorusGrid grid(2, 16, 9.6);
  SkewForm j = SkewForm::standard(2, 2.0);
  // restrict(symbol(L_f)) = f.
  GridFunction f_hat = random_band_limited(grid, 2, 3, rng);
  GridFunction f = fourier_inv(f_hat);
  GridFunction rec = restrict_symbol(extract_symbol(op_left(f_hat, j)));
  EXPECT_LT(norm_E(rec - f), 1e-12);
  // restrict(symbol(identity)) = 1_C.
  GridFunction one = restrict_symbol(extract_symbol(identity_op(grid, 2)));
  GridFunction expected =
      sample_scalar([](std::span<const double>) { return Complex(1, 0); }, grid, 2);
  EXPECT_LT(norm_E(one - expected), 1e-12);
}

TEST(Commutant, LeftMultsPassTranslationsFail) {
  Rng rng(75);
  TorusGrid grid(1, 64, 8.0);
  SkewForm j0 = SkewForm::zero(1);
  auto probes = random_probe_pairs(grid, 1, 5, 4, rng);

  GridOperator lf = op_left(random_band_limited(grid, 1, 5, rng), j0);
  EXPECT_LT(commutant_residual(lf, probes, j0), 1e-10);
  EXPECT_EQ(commutant_residual(identity_op(grid, 1), probes, j0), 0.0);

  std::vector<int> a = {16}, z = {0};
  GridOperator shift = heisenberg_op_steps(grid, 1, a, z, 0.0);
  EXPECT_GT(commutant_residual(shift, probes, j0), 0.1);

  GridOperator rank_one = rank_one_op(rand_pos(grid, 1, 5, rng), rand_pos(grid, 1, 5, rng));
  EXPECT_GT(commutant_residual(rank_one, probes, j0), 0.1);

  EXPECT_THROW(commutant_residual(lf, {}, j0), std::invalid_argument);
}

TEST(Conjecture, PositiveNegativeAndIdentityVerdicts) {
  Rng rng(76);
  TorusGrid grid(1, 64, 8.0);
  SkewForm j0 = SkewForm::zero(1);
  auto probes = random_probe_pairs(grid, 2, 5, 4, rng);

  GridFunction f_hat = random_band_limited(grid, 2, 5, rng);
  GridFunction f = fourier_inv(f_hat);
  ConjectureVerdict pos = verify_conjecture(op_left(f_hat, j0), j0, probes, 1e-8);
  ASSERT_EQ(pos.kind, VerdictKind::is_left_mult);
  ASSERT_TRUE(pos.multiplier.has_value());
  EXPECT_LT(norm_E(*pos.multiplier - f), 1e-9);

  std::vector<int> a = {16}, z = {0};
  ConjectureVerdict neg =
      verify_conjecture(heisenberg_op_steps(grid, 2, a, z, 0.0), j0, probes, 1e-8);
  EXPECT_EQ(neg.kind, VerdictKind::not_in_commutant);
  EXPECT_GT(neg.commutant_res, 0.1);

  ConjectureVerdict id = verify_conjecture(identity_op(grid, 2), j0, probes, 1e-8);
  ASSERT_EQ(id.kind, VerdictKind::is_left_mult);
  GridFunction one = sample_scalar([](std::span<const double>) { return Complex(1, 0); }, grid, 2);
  EXPECT_LT(norm_E(*id.multiplier - one), 1e-10);
}

TEST(Cordes, LinearityZeroAndCauchySchwarz) {
  Rng rng(77);
  TorusGrid grid(1, 32, 8.0);
  SkewForm j0 = SkewForm::zero(1);
  CordesProbes probes = default_cordes_probes(grid);
  std::vector<int> x = {2}, xi = {-1};

  GridOperator a = op_left(random_band_limited(grid, 1, 4, rng), j0);
  GridOperator b = op_left(random_band_limited(grid, 1, 4, rng), j0);
  Complex alpha(0.3, -1.1);
  CordesResult ra = cordes_pairing(a, probes, x, xi);
  CordesResult rb = cordes_pairing(b, probes, x, xi);
  CordesResult rab = cordes_pairing(lin_comb({alpha, Complex(1, 0)}, {a, b}), probes, x, xi);
  MatrixElement expected = alpha * ra.value + rb.value;
  EXPECT_NEAR(cstar_norm(rab.value - expected), 0.0,
              1e-10 * (1.0 + cstar_norm(expected)));

  CordesResult rz = cordes_pairing(zero_op(grid, 1), probes, x, xi);
  EXPECT_NEAR(cstar_norm(rz.value), 0.0, 1e-14);

  EXPECT_LE(cstar_norm(ra.value), ra.cauchy_schwarz_bound * (1.0 + 1e-12));
}

TEST(Cordes, ExactAndDifferenceQuotientDerivationsAgree) {
  Rng rng(78);
  TorusGrid grid(1, 64, 12.0);
  SkewForm j0 = SkewForm::zero(1);
  CordesProbes probes = default_cordes_probes(grid);
  std::vector<int> x = {1}, xi = {1};
  GridOperator a = op_left(random_band_limited(grid, 1, 3, rng), j0);
  CordesOptions exact_opts;
  CordesOptions fd_opts;
  fd_opts.prefer_exact_derivations = false;
  CordesResult exact = cordes_pairing(a, probes, x, xi, exact_opts);
  CordesResult fd = cordes_pairing(a, probes, x, xi, fd_opts);
  double scale = cstar_norm(exact.value) + 1e-6;
  EXPECT_LT(cstar_norm(exact.value - fd.value) / scale, 1e-3);
}

TEST(SymbolConvergence, IdentityOperatorSweep) {
  TorusGrid grid(1, 128, 64.0);
  MollifierFamily family(grid);
  SkewForm j0 = SkewForm::zero(1);
  GridOperator id = identity_op(grid, 1);
  std::vector<SymbolSample> samples;
  for (int dx : {-8, 0, 8})
    for (int dq : {-1, 0, 1}) {
      std::vector<int> pi = {grid.samples() / 2 + dx};
      std::vector<int> qi = {grid.storage_index(dq)};
      samples.push_back({grid.encode(pi.data()), grid.encode(qi.data())});
    }
  std::vector<int> sweep = {1, 2, 3, 4, 5, 6};
  auto rows = symbol_convergence_test(id, family, samples, sweep, j0);
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_LE(rows[i].max_residual, rows[i - 1].max_residual + 1e-12);
  EXPECT_LT(rows.back().max_residual, rows.front().max_residual);

  // The zero operator has residual zero at every sample and index.
  auto zero_rows = symbol_convergence_test(zero_op(grid, 1), family, samples, sweep, j0);
  for (const auto& row : zero_rows) EXPECT_EQ(row.max_residual, 0.0);
}

}  // namespace
}  // namespace rieffel
