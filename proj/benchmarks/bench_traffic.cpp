#include <benchmark/benchmark.h>

#include "netenergy/gp.hpp"
#include "netenergy/traffic.hpp"

using namespace netenergy::traffic;

static void BM_GpFit(benchmark::State& state) {
  auto s = generate_synthetic_traffic(TrafficKind::voice, static_cast<std::size_t>(state.range(0)), 3);
  const GpSpec spec{KernelSpec::periodic({24.0}, {1.0, 2.0}, {0.05, 0.1}), {1e-3, 2e-3}};
  for (auto _ : state) {
    auto m = gp_fit(s, spec);
    benchmark::DoNotOptimize(m.log_likelihood());
  }
}
BENCHMARK(BM_GpFit)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_Exceedance(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; k += n / 8 + 1) acc += exceedance_probability(n, k, 0.9);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_Exceedance)->Arg(30)->Arg(60)->Arg(500);
