#include <benchmark/benchmark.h>

#include "rieffel/experiment.hpp"
#include "rieffel/symbol.hpp"

namespace {

using namespace rieffel;

void BM_Fourier1d(benchmark::State& state) {
  TorusGrid grid(1, static_cast<int>(state.range(0)), 32.0);
  Rng rng(1);
  GridFunction f = fourier_inv(random_band_limited(grid, 2, grid.samples() / 4, rng));
  for (auto _ : state) benchmark::DoNotOptimize(fourier(f));
}
BENCHMARK(BM_Fourier1d)->Arg(128)->Arg(512)->Arg(2048);

void BM_DeformedProductDenseSpectra(benchmark::State& state) {
  TorusGrid grid(1, static_cast<int>(state.range(0)), 32.0);
  SkewForm j0 = SkewForm::zero(1);
  Rng rng(2);
  GridFunction f = fourier_inv(random_band_limited(grid, 2, grid.samples() / 4, rng));
  GridFunction g = fourier_inv(random_band_limited(grid, 2, grid.samples() / 4, rng));
  for (auto _ : state) benchmark::DoNotOptimize(deformed_product(f, g, j0));
}
BENCHMARK(BM_DeformedProductDenseSpectra)->Arg(64)->Arg(128)->Arg(256);

void BM_OpLeftApplyTwisted2d(benchmark::State& state) {
  TorusGrid grid(2, 32, 12.8);
  SkewForm j = SkewForm::standard(2, 0.5);
  Rng rng(3);
  GridFunction f = random_band_limited(grid, 2, static_cast<int>(state.range(0)), rng);
  GridFunction g = fourier_inv(random_band_limited(grid, 2, 4, rng));
  GridOperator lf = op_left(f, j);
  for (auto _ : state) benchmark::DoNotOptimize(lf.apply(g));
}
BENCHMARK(BM_OpLeftApplyTwisted2d)->Arg(2)->Arg(4)->Arg(8);

void BM_ExtractSymbol2d(benchmark::State& state) {
  TorusGrid grid(2, static_cast<int>(state.range(0)), 12.8);
  SkewForm j = SkewForm::standard(2, 0.5);
  Rng rng(4);
  GridOperator lf = op_left(random_band_limited(grid, 1, 3, rng), j);
  for (auto _ : state) benchmark::DoNotOptimize(extract_symbol(lf));
}
BENCHMARK(BM_ExtractSymbol2d)->Arg(8)->Arg(16)->Arg(32);

void BM_OperatorNormEstimate(benchmark::State& state) {
  TorusGrid grid(1, 128, 16.0);
  SkewForm j0 = SkewForm::zero(1);
  Rng rng(5);
  GridOperator rg = op_right(random_band_limited(grid, 2, 6, rng), j0);
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm_estimate(rg, 7, 30));
}
BENCHMARK(BM_OperatorNormEstimate);

}  // namespace

BENCHMARK_MAIN();
