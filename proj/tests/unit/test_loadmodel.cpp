#include <cmath>
#include <vector>

#include "doctest.h"
#include "netenergy/errors.hpp"
#include "netenergy/loadmodel.hpp"
#include "oracles.hpp"

using namespace netenergy;
using namespace netenergy::load;

namespace {

// Stations and test points with explicit gains; unit radio constants.
NetworkScenario manual(std::size_t m, std::size_t n, const std::vector<double>& gains,
                       const std::vector<double>& demand, double power = 1.0, double noise = 1.0) {
  NetworkScenario sc;
  for (std::size_t i = 0; i < m; ++i) sc.stations.push_back({i, {100.0 * i, 0.0}, power, 1.0});
  for (std::size_t j = 0; j < n; ++j) sc.test_points.push_back({j, {50.0 * j, 10.0}, demand[j]});
  sc.gains = Matrix(m, n);
  for (std::size_t k = 0; k < m * n; ++k) sc.gains.data()[k] = gains[k];
  sc.resource_units = 1;
  sc.bandwidth_per_ru = 1.0;
  sc.sinr_scaling = 1.0;
  sc.noise_power = noise;
  sc.region_side = 1000.0;
  sc.validate();
  return sc;
}

NetworkScenario symmetric_pair(double demand) {
  // Two stations, two test points, each point close to its own station.
  return manual(2, 2, {1.0, 0.2, 0.2, 1.0}, {demand, demand});
}

}  // namespace

TEST_SUITE("loadmodel") {

TEST_CASE("unit SINR gives one bit per resource unit") {
  const auto sc = manual(1, 1, {1.0}, {1.0});
  const std::vector<double> rho{0.7};
  CHECK(spectral_efficiency(sc, 0, 0, rho) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("idle interferers leave the interference-free SINR") {
  const auto sc = manual(3, 1, {2.0, 5.0, 7.0}, {1.0}, 1.0, 0.5);
  const std::vector<double> zero(3, 0.0);
  CHECK(spectral_efficiency(sc, 0, 0, zero) == doctest::Approx(std::log2(1.0 + 2.0 / 0.5)));
}

TEST_CASE("two-station closed form at full neighbour load") {
  const auto sc = symmetric_pair(1.0);
  const std::vector<double> rho{0.3, 1.0};
  // log2(1 + 1 / (0.2 * 1 + 1)), by hand.
  CHECK(spectral_efficiency(sc, 0, 0, rho) == doctest::Approx(std::log2(1.0 + 1.0 / 1.2)));
  CHECK_THROWS_AS(spectral_efficiency(sc, 0, 0, std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("worst-case efficiency") {
  SUBCASE("single station has no interferers") {
    const auto sc = manual(1, 2, {1.0, 3.0}, {1.0, 1.0});
    const auto w = worst_case_efficiency(sc);
    CHECK(w(0, 0) == doctest::Approx(1.0));
    CHECK(w(0, 1) == doctest::Approx(2.0));
  }
  SUBCASE("symmetric pair is symmetric") {
    const auto w = worst_case_efficiency(symmetric_pair(1.0));
    CHECK(w(0, 0) == doctest::Approx(w(1, 1)));
    CHECK(w(0, 1) == doctest::Approx(w(1, 0)));
  }
  SUBCASE("never above the efficiency at lighter loads") {
    const auto sc = generate_hex_scenario(7, 20, 5);
    const auto w = worst_case_efficiency(sc);
    Rng rng(9);
    for (int t = 0; t < 50; ++t) {
      std::vector<double> rho(7);
      for (auto& r : rho) r = rng.uniform();
      for (std::size_t i = 0; i < 7; ++i) {
        for (std::size_t j = 0; j < 20; ++j) {
          CHECK(w(i, j) <= spectral_efficiency(sc, i, j, rho) * (1 + 1e-12));
        }
      }
    }
  }
  SUBCASE("cap applies") {
    const auto sc = manual(1, 1, {100.0}, {1.0});
    CHECK(worst_case_efficiency(sc, 2.0)(0, 0) == 2.0);
  }
}

TEST_CASE("assignment invariants") {
  Matrix e(2, 2, 0.5);
  CHECK_NOTHROW(AssignmentMatrix(e, AssignmentMode::relaxed).validate());
  CHECK_THROWS_AS(AssignmentMatrix(e, AssignmentMode::discrete).validate(), InvalidArgument);
  e(0, 0) = 0.7;
  CHECK_THROWS_AS(AssignmentMatrix(e, AssignmentMode::relaxed).validate(), InvalidArgument);
  Matrix d(2, 2, 0.0);
  d(0, 0) = d(0, 1) = 1.0;
  CHECK_NOTHROW(AssignmentMatrix(d, AssignmentMode::discrete).validate());
  CHECK_THROWS_AS(AssignmentMatrix(d, AssignmentMode::discrete, true).validate(), InvalidArgument);
}

TEST_CASE("load mapping matches a direct evaluation") {
  const auto sc = generate_hex_scenario(5, 30, 2);
  const auto a = AssignmentMatrix::best_server(sc);
  const auto lm = load_mapping(sc, a);
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> full(5);
    for (auto& r : full) r = rng.uniform();
    std::vector<double> reduced;
    for (auto s : lm.stations) reduced.push_back(full[s]);
    // Idle stations radiate nothing.
    std::vector<double> masked(5, 0.0);
    for (auto s : lm.stations) masked[s] = full[s];
    const auto expect = oracle::load_direct(sc, a.entries(), masked);
    const auto got = lm.mapping(reduced);
    for (std::size_t k = 0; k < lm.stations.size(); ++k) {
      CHECK(got[k] == doctest::Approx(expect[lm.stations[k]]).epsilon(1e-12));
    }
  }
}

TEST_CASE("demand at exact capacity gives load one") {
  auto sc = manual(1, 1, {1.0}, {1.0});
  sc.resource_units = 4;
  // omega(0) = 1, so d = K * omega = 4.
  sc.test_points[0].demand = 4.0;
  const auto a = AssignmentMatrix::best_server(sc);
  const auto lm = load_mapping(sc, a);
  const auto r = ifcalc::fixed_point(load_limited_mapping(lm.mapping));
  CHECK(r.fixed_point[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lm.mapping(std::vector<double>{0.3})[0] == 1.0);
}

TEST_CASE("doubling demand doubles the mapping") {
  const auto sc = generate_hex_scenario(4, 12, 6);
  auto sc2 = sc;
  for (auto& t : sc2.test_points) t.demand *= 2.0;
  const auto a = AssignmentMatrix::best_server(sc);
  const auto lm1 = load_mapping(sc, a);
  const auto lm2 = load_mapping(sc2, a);
  std::vector<double> rho(lm1.stations.size(), 0.4);
  const auto y1 = lm1.mapping(rho);
  const auto y2 = lm2.mapping(rho);
  for (std::size_t k = 0; k < y1.size(); ++k) CHECK(y2[k] == doctest::Approx(2.0 * y1[k]));
}

TEST_CASE("symmetric pair has equal loads") {
  const auto sc = symmetric_pair(0.3);
  const auto lm = load_mapping(sc, AssignmentMatrix::best_server(sc));
  const auto r = ifcalc::fixed_point(load_limited_mapping(lm.mapping));
  CHECK(r.fixed_point[0] == doctest::Approx(r.fixed_point[1]).epsilon(1e-9));
  CHECK(r.fixed_point[0] < 1.0);
}

TEST_CASE("idle station in the mapping is a dimension error") {
  const auto sc = symmetric_pair(0.3);
  Matrix x(2, 2, 0.0);
  x(0, 0) = x(0, 1) = 1.0;
  const AssignmentMatrix a(x, AssignmentMode::discrete);
  const std::vector<std::size_t> both{0, 1};
  CHECK_THROWS_AS(load_mapping(sc, a, both), DimensionError);
  const auto lm = load_mapping(sc, a);
  REQUIRE(lm.stations.size() == 1);
  CHECK(lm.stations[0] == 0);
}

TEST_CASE("capped mapping") {
  const auto sc = generate_hex_scenario(4, 16, 12);
  const auto a = AssignmentMatrix::best_server(sc);
  const auto base = load_mapping(sc, a);
  Rng rng(2);
  std::vector<double> rho(base.stations.size());
  for (int t = 0; t < 20; ++t) {
    for (auto& r : rho) r = rng.uniform();
    const auto y = base.mapping(rho);
    const auto huge = capped_load_mapping(sc, a, 1e300).mapping(rho);
    for (std::size_t k = 0; k < y.size(); ++k) CHECK(huge[k] == doctest::Approx(y[k]).epsilon(1e-14));

    const double tiny = 1e-6;
    const auto small = capped_load_mapping(sc, a, tiny).mapping(rho);
    for (std::size_t k = 0; k < y.size(); ++k) {
      double expect = 0.0;
      for (std::size_t j = 0; j < sc.num_test_points(); ++j) {
        expect += sc.test_points[j].demand * a(base.stations[k], j) /
                  (static_cast<double>(sc.resource_units) * tiny);
      }
      CHECK(small[k] == doctest::Approx(expect).epsilon(1e-12));
    }

    const auto mid = capped_load_mapping(sc, a, 2e5).mapping(rho);
    for (std::size_t k = 0; k < y.size(); ++k) CHECK(mid[k] >= y[k]);
  }
  CHECK_THROWS_AS(capped_load_mapping(sc, a, 0.0), InvalidArgument);
}

TEST_CASE("load-limited mapping") {
  SUBCASE("inactive limit keeps the fixed point") {
    const auto sc = symmetric_pair(0.2);
    const auto lm = load_mapping(sc, AssignmentMatrix::best_server(sc));
    const auto limited = ifcalc::fixed_point(load_limited_mapping(lm.mapping));
    const auto plain = ifcalc::picard_from(lm.mapping, std::vector<double>(2, 0.0));
    CHECK(ifcalc::sup_distance(limited.fixed_point, plain.fixed_point) < 1e-8);
  }
  SUBCASE("constant two clamps to one") {
    const auto r = ifcalc::fixed_point(load_limited_mapping(ifcalc::InterferenceMapping::constant(1, 2.0)));
    CHECK(r.fixed_point[0] == 1.0);
  }
  SUBCASE("overloaded neighbour pinned at one") {
    const auto sc = manual(2, 2, {1.0, 0.2, 0.2, 1.0}, {5.0, 0.2});
    const auto lm = load_mapping(sc, AssignmentMatrix::best_server(sc));
    const auto r = ifcalc::fixed_point(load_limited_mapping(lm.mapping));
    CHECK(r.fixed_point[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.fixed_point[1] < 1.0);
    const auto expect = oracle::load_direct(sc, AssignmentMatrix::best_server(sc).entries(), {1.0, 0.0});
    CHECK(r.fixed_point[1] == doctest::Approx(expect[1]).epsilon(1e-9));
  }
}

TEST_CASE("single-cell feasibility") {
  auto sc = manual(1, 1, {3.0}, {0.2});
  // omega(0) = log2(4) = 2, K = 1: load = d / 2 = 0.1.
  const auto a = AssignmentMatrix::best_server(sc);
  const auto ok = feasibility_check(sc, a, 1e-10);
  CHECK(ok.feasible);
  CHECK(ok.load[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(ok.reason.empty());

  sc.test_points[0].demand *= 20.0;
  const auto bad = feasibility_check(sc, a, 1e-10);
  CHECK_FALSE(bad.feasible);
  REQUIRE(bad.overloaded.size() == 1);
  CHECK(bad.overloaded[0] == 0);
  CHECK(bad.reason.find("overloaded capacity") != std::string::npos);
}

TEST_CASE("generated load mappings are standard") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto sc = generate_hex_scenario(6, 40, seed);
    const auto lm = load_mapping(sc, AssignmentMatrix::best_server(sc));
    CHECK(ifcalc::check_axioms(lm.mapping, 300, seed).ok());
  }
}

TEST_CASE("more demand never lowers any load") {
  auto sc = generate_hex_scenario(5, 25, 3);
  for (auto& t : sc.test_points) t.demand = 2e6;
  const auto a = AssignmentMatrix::best_server(sc);
  const auto base = feasibility_check(sc, a, 1e-11);
  for (std::size_t j = 0; j < sc.num_test_points(); j += 5) {
    auto more = sc;
    more.test_points[j].demand *= 1.5;
    const auto r = feasibility_check(more, a, 1e-11);
    for (std::size_t i = 0; i < sc.num_stations(); ++i) CHECK(r.load[i] >= base.load[i] - 1e-10);
  }
}

TEST_CASE("fixed efficiency and residual") {
  const auto sc = generate_hex_scenario(4, 20, 8);
  const auto a = AssignmentMatrix::best_server(sc);
  FeasibilityOptions fo;
  fo.fixed_efficiency = worst_case_efficiency(sc);
  const auto worst = feasibility_check(sc, a, 1e-10, fo);
  const auto coupled = feasibility_check(sc, a, 1e-10);
  for (std::size_t i = 0; i < 4; ++i) CHECK(worst.load[i] >= coupled.load[i] - 1e-12);
  CHECK(coupled.uncapped_residual <= 1e-9);
}

}  // TEST_SUITE
