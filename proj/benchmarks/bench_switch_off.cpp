#include <benchmark/benchmark.h>

#include <memory>

#include "netenergy/energyopt.hpp"
#include "netenergy/scenario.hpp"

using namespace netenergy;

namespace {

energy::SwitchOffProblem instance(std::size_t n) {
  auto sc = std::make_shared<const NetworkScenario>(generate_hex_scenario(10, n, 11));
  return energy::SwitchOffProblem::from_scenario(sc);
}

void BM_MmRounding(benchmark::State& state) {
  const auto p = instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto plan = energy::round_assignments(energy::mm_solve(p), p);
    benchmark::DoNotOptimize(plan.active.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MmRounding)->DenseRange(20, 80, 20)->Complexity()->Unit(benchmark::kMillisecond);

void BM_Exact(benchmark::State& state) {
  const auto p = instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto plan = energy::exact_solve(p);
    benchmark::DoNotOptimize(plan.active.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Exact)->DenseRange(20, 80, 20)->Complexity()->Unit(benchmark::kMillisecond);

}  // namespace
