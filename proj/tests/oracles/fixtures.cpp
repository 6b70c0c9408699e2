#include "fixtures.hpp"

#include <algorithm>

#include "netenergy/loadmodel.hpp"

namespace fixture {

std::shared_ptr<const netenergy::NetworkScenario> calibrated_scenario(std::size_t m, std::size_t n,
                                                                      std::uint64_t seed,
                                                                      double best_case_load) {
  auto sc = netenergy::generate_hex_scenario(m, n, seed);
  const auto w = netenergy::load::worst_case_efficiency(sc);
  double inverse_sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) best = std::max(best, w(i, j));
    inverse_sum += 1.0 / best;
  }
  const double demand = best_case_load * static_cast<double>(sc.resource_units) / inverse_sum;
  for (auto& t : sc.test_points) t.demand = demand;
  return std::make_shared<const netenergy::NetworkScenario>(std::move(sc));
}

netenergy::energy::SwitchOffProblem explicit_problem(std::size_t m, std::size_t n,
                                                     const std::vector<double>& efficiency,
                                                     const std::vector<double>& demand,
                                                     double epsilon) {
  netenergy::NetworkScenario sc;
  for (std::size_t i = 0; i < m; ++i) sc.stations.push_back({i, {100.0 * i, 0.0}, 1.0, 1.0});
  for (std::size_t j = 0; j < n; ++j) sc.test_points.push_back({j, {10.0 * j, 5.0}, demand[j]});
  sc.gains = netenergy::Matrix(m, n, 1.0);
  sc.resource_units = 1;
  sc.bandwidth_per_ru = 1.0;
  sc.noise_power = 1.0;
  netenergy::Matrix eff(m, n);
  for (std::size_t k = 0; k < m * n; ++k) eff.data()[k] = efficiency[k];
  return netenergy::energy::SwitchOffProblem(
      std::make_shared<const netenergy::NetworkScenario>(std::move(sc)), std::move(eff),
      std::vector<double>(m, 1.0), {}, epsilon, {});
}

}  // namespace fixture
