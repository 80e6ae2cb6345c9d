#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "cbf_surrogate/crossval.hpp"
#include "cbf_surrogate/rng.hpp"
#include "cbf_surrogate/svr.hpp"

using namespace cbf_surrogate;

namespace {

struct Problem {
  Matrix gram;
  std::vector<double> z;
};

Problem make_problem(std::size_t n, std::size_t d) {
  SplitMix64 rng(7);
  Matrix x(n, d);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.normal();
    z[i] = std::sin(2 * x(i, 0)) + 0.2 * rng.normal();
  }
  return {rbf_gram(x, 0.5 / static_cast<double>(d)), z};
}

void run_smo(benchmark::State& state, SolverOptions opt) {
  const auto p = make_problem(static_cast<std::size_t>(state.range(0)), 4);
  std::size_t iters = 0;
  for (auto _ : state) {
    const auto sol = solve_svr_dual(p.gram, p.z, 8.0, 0.1, opt);
    iters = sol.iterations;
    benchmark::DoNotOptimize(sol.bias);
  }
  state.counters["smo_iterations"] = static_cast<double>(iters);
}

void BM_SmoMaxViolatingPair(benchmark::State& state) { run_smo(state, SolverOptions{}); }
void BM_SmoPipeline(benchmark::State& state) { run_smo(state, pipeline_solver()); }

void BM_RbfGram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SplitMix64 rng(3);
  Matrix x(n, 8);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 8; ++j) x(i, j) = rng.normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(rbf_gram(x, 0.125));
}

}  // namespace

BENCHMARK(BM_SmoMaxViolatingPair)->Arg(50)->Arg(180)->Arg(400);
BENCHMARK(BM_SmoPipeline)->Arg(50)->Arg(180)->Arg(400);
BENCHMARK(BM_RbfGram)->Arg(180)->Arg(400);
