#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "cbf_surrogate/crossval.hpp"
#include "cbf_surrogate/rng.hpp"

using namespace cbf_surrogate;

namespace {

void BM_GridSearchDefaultGrid(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 5;
  SplitMix64 rng(5);
  Matrix x(n, d);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < d; ++j) s += x(i, j) = rng.normal();
    y[i] = 60 + 5 * s + 5 * rng.normal();
  }
  const auto grid = HyperGrid::defaults(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_search(x, y, grid, 10, 3, pipeline_solver()).best_rmse);
  }
}

}  // namespace

BENCHMARK(BM_GridSearchDefaultGrid)->Arg(71)->Unit(benchmark::kMillisecond);
