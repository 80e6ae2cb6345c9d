#include <benchmark/benchmark.h>

#include <vector>

#include "cbf_surrogate/rng.hpp"
#include "cbf_surrogate/spectral.hpp"

using namespace cbf_surrogate;

namespace {

void BM_SpectralFeatures(benchmark::State& state) {
  SplitMix64 rng(1);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = 100 + rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(spectral_features(x, 0.72));
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_SpectralFeatures)->Arg(500)->Arg(1200);
