#include <benchmark/benchmark.h>

#include <cmath>

#include "bmlab/concavity.hpp"
#include "bmlab/counterexamples.hpp"
#include "bmlab/parallel.hpp"
#include "bmlab/supconv.hpp"

using namespace bmlab;

namespace {

void BM_PolygonGaussianMeasure(benchmark::State& state) {
  const MeasureEvaluator g(DensityND::gaussian_standard(2));
  const auto p = ConvexPolygon::regular(static_cast<std::size_t>(state.range(0)), 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(g.measure(p));
}
BENCHMARK(BM_PolygonGaussianMeasure)->Arg(4)->Arg(16)->Arg(64);

void BM_PolygonCombination(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = ConvexPolygon::regular(n, 1.0);
  const auto b = ConvexPolygon::regular(n, 2.0, {0.5, -0.25}, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(mink_combine_polygon(a, b, 0.3));
}
BENCHMARK(BM_PolygonCombination)->Arg(8)->Arg(64)->Arg(512);

void BM_CheckBmHexagons(benchmark::State& state) {
  const MeasureEvaluator g(DensityND::gaussian_standard(2));
  const auto a = ConvexPolygon::regular(6, 0.5);
  const auto b = ConvexPolygon::regular(6, 1.75);
  const auto grid = default_lambda_grid();
  for (auto _ : state) benchmark::DoNotOptimize(check_bm(g, a, b, 0.5, grid));
}
BENCHMARK(BM_CheckBmHexagons)->Unit(benchmark::kMillisecond);

void BM_SupconvMin(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  GridFunction1D f{-4.0, 8.0 / static_cast<double>(n - 1), std::vector<double>(n)};
  GridFunction1D g = f;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = f.x(i);
    f.values[i] = std::exp(-0.5 * x * x);
    g.values[i] = std::exp(-std::abs(x - 0.5));
  }
  for (auto _ : state) benchmark::DoNotOptimize(supconv_min(f, g, 0.4));
}
BENCHMARK(BM_SupconvMin)->Arg(128)->Arg(512);

void BM_SupconvGamma2D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const double h = 4.0 / static_cast<double>(n - 1);
  GridFunction2D f{-2, -2, h, h, n, n, std::vector<double>(n * n)};
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double x = f.x0 + ix * h, y = f.y0 + iy * h;
      f.values[iy * n + ix] = 1.0 / (1.0 + x * x + y * y);
    }
  for (auto _ : state) benchmark::DoNotOptimize(supconv_gamma_2d(f, f, 0.5, -1.0));
}
BENCHMARK(BM_SupconvGamma2D)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ParallelCurve(benchmark::State& state) {
  const MeasureEvaluator g(DensityND::gaussian_standard(2));
  const auto a = ConvexPolygon::box(-0.5, 1.5, -1.0, 0.25);
  const auto ts = linspace(0, 2, 21);
  for (auto _ : state) benchmark::DoNotOptimize(parallel_curve(g, a, disk_polygon(32), ts));
}
BENCHMARK(BM_ParallelCurve)->Unit(benchmark::kMillisecond);

void BM_PowerFamilyDeficit(benchmark::State& state) {
  const PowerFamilyInstance inst{0.5, 1.0, 0.5, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(power_family_deficit(inst, 0.5));
}
BENCHMARK(BM_PowerFamilyDeficit);

}  // namespace

BENCHMARK_MAIN();
