#include <benchmark/benchmark.h>

#include "netenergy/lp.hpp"
#include "netenergy/rng.hpp"

using namespace netenergy;

namespace {

// Transportation-shaped LP: n_src supplies, n_dst demands, dense costs.
lp::LinearProgram transport(std::size_t n_src, std::size_t n_dst, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t nv = n_src * n_dst;
  lp::LinearProgram p;
  p.objective.resize(nv);
  for (auto& c : p.objective) c = rng.uniform(1.0, 10.0);
  p.a_ub = Matrix(n_src, nv);
  p.b_ub.assign(n_src, 1.5 * static_cast<double>(n_dst) / static_cast<double>(n_src));
  p.a_eq = Matrix(n_dst, nv);
  p.b_eq.assign(n_dst, 1.0);
  for (std::size_t i = 0; i < n_src; ++i) {
    for (std::size_t j = 0; j < n_dst; ++j) {
      p.a_ub(i, i * n_dst + j) = 1.0;
      p.a_eq(j, i * n_dst + j) = 1.0;
    }
  }
  return p;
}

void BM_LpTransport(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = transport(10, n, 42);
  for (auto _ : state) {
    auto r = lp::lp_solve(p);
    benchmark::DoNotOptimize(r.objective);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LpTransport)->RangeMultiplier(2)->Range(10, 160)->Complexity()->Unit(benchmark::kMillisecond);

}  // namespace
