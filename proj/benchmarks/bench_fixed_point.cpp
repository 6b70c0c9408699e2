#include <benchmark/benchmark.h>

#include "netenergy/ifcalc.hpp"
#include "netenergy/loadmodel.hpp"
#include "netenergy/scenario.hpp"

using namespace netenergy;

static void BM_LoadFixedPoint(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  RadioParams params;
  params.demand = 4e6;
  const auto sc = generate_hex_scenario(m, 5 * m, 7, params);
  const auto x = load::AssignmentMatrix::best_server(sc);
  const auto limited = load::load_limited_mapping(load::load_mapping(sc, x).mapping);
  for (auto _ : state) {
    auto r = ifcalc::fixed_point(limited);
    benchmark::DoNotOptimize(r.fixed_point.data());
  }
}
BENCHMARK(BM_LoadFixedPoint)->Arg(10)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_FeasibilityCheck(benchmark::State& state) {
  const auto sc = generate_hex_scenario(100, 500, 1);
  const auto x = load::AssignmentMatrix::best_server(sc);
  for (auto _ : state) {
    auto r = load::feasibility_check(sc, x, 1e-9);
    benchmark::DoNotOptimize(r.feasible);
  }
}
BENCHMARK(BM_FeasibilityCheck)->Unit(benchmark::kMillisecond);
