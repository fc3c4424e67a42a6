// Serial reference vs OpenMP kernels: one DP backward step over a large
// reachable set and one G-heat stencil sweep.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "sublin/kernels.hpp"
#include "sublin/lattice.hpp"

namespace {

using sublin::kernels::Exec;

sublin::LatticeStep<double> two_variance_step() {
  // {+-1 w.p. 1/2} and {+-2 w.p. 1/2} on spacing 1/2.
  sublin::LatticeStep<double> step;
  step.measures.push_back({{-2, 2}, {0.5, 0.5}});
  step.measures.push_back({{-1, 1}, {0.5, 0.5}});
  step.offsets = {-2, -1, 1, 2};
  return step;
}

void BM_BackwardStep(benchmark::State& state) {
  const auto exec = static_cast<Exec>(state.range(0));
  const auto half = static_cast<std::int64_t>(state.range(1));
  const auto step = two_variance_step();
  std::vector<std::int64_t> next_states(static_cast<std::size_t>(2 * (half + 2) + 1));
  std::iota(next_states.begin(), next_states.end(), -(half + 2));
  std::vector<std::int64_t> states(static_cast<std::size_t>(2 * half + 1));
  std::iota(states.begin(), states.end(), -half);
  std::vector<double> next(next_states.size());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] = std::fabs(static_cast<double>(next_states[i]));
  const sublin::kernels::Locator loc(next_states);
  std::vector<double> out(states.size());
  for (auto _ : state) {
    sublin::kernels::backward_step<double>(exec, states, step, loc, next, out, {});
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(states.size()));
}

void BM_GHeatStep(benchmark::State& state) {
  const auto exec = static_cast<Exec>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const double dx = 0.01;
  std::vector<double> u(n);
  for (std::size_t j = 0; j < n; ++j) u[j] = 1.0 - std::fabs(-0.5 * dx * static_cast<double>(n) + dx * static_cast<double>(j));
  std::vector<double> out(n);
  for (auto _ : state) {
    sublin::kernels::g_heat_step(exec, u, out, 0.4 * dx * dx, dx, 0.25, 1.0);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

}  // namespace

BENCHMARK(BM_BackwardStep)->ArgsProduct({{0, 1}, {1 << 10, 1 << 16, 1 << 20}});
BENCHMARK(BM_GHeatStep)->ArgsProduct({{0, 1}, {1 << 12, 1 << 16, 1 << 20}});

BENCHMARK_MAIN();
