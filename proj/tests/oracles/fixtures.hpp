#pragma once

// Shared instance builders for unit and acceptance tests.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "netenergy/energyopt.hpp"
#include "netenergy/scenario.hpp"

namespace fixture {

// Hex deployment whose per-point demand is scaled so that serving every test
// point from its best station needs `best_case_load` stations' worth of
// resources in total.
std::shared_ptr<const netenergy::NetworkScenario> calibrated_scenario(std::size_t m, std::size_t n,
                                                                      std::uint64_t seed,
                                                                      double best_case_load);

// Problem with an explicit efficiency matrix (row-major M x N) on unit radio
// constants: load coefficient d_j / w_ij with K = 1.
netenergy::energy::SwitchOffProblem explicit_problem(std::size_t m, std::size_t n,
                                                     const std::vector<double>& efficiency,
                                                     const std::vector<double>& demand,
                                                     double epsilon = netenergy::energy::kDefaultEpsilon);

}  // namespace fixture
