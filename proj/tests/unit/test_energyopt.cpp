#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "netenergy/energyopt.hpp"
#include "netenergy/errors.hpp"
#include "netenergy/rng.hpp"

using namespace netenergy;
using namespace netenergy::energy;

namespace {

// Direct evaluation of one surrogate term.
double term(double rho, double eps) { return (std::log(eps + rho) - std::log(eps)) / std::log(1.0 + 1.0 / eps); }

SwitchOffProblem two_identical(double total_load) {
  // Four equal test points, both stations equally efficient.
  const double d = total_load / 4.0;
  return fixture::explicit_problem(2, 4, std::vector<double>(8, 1.0), {d, d, d, d});
}

void check_relaxed_constraints(const RelaxedSolution& s, const SwitchOffProblem& p) {
  const auto rho = p.loads(s.assignment);
  for (std::size_t i = 0; i < p.num_stations(); ++i) {
    CHECK(rho[i] >= -1e-8);
    CHECK(rho[i] <= 1.0 + 1e-8);
    CHECK(std::abs(rho[i] - s.load[i]) <= 1e-8);
  }
  for (std::size_t j = 0; j < p.num_test_points(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.num_stations(); ++i) {
      CHECK(s.assignment(i, j) >= -1e-8);
      CHECK(s.assignment(i, j) <= 1.0 + 1e-8);
      sum += s.assignment(i, j);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
  }
}

}  // namespace

TEST_SUITE("energyopt") {

TEST_CASE("surrogate at zero and full load") {
  auto p = fixture::explicit_problem(3, 1, {1.0, 1.0, 1.0}, {0.5});
  const std::vector<double> zero(3, 0.0);
  CHECK(surrogate_objective(p, zero) == 0.0);
  const std::vector<double> full(3, 1.0);
  for (double eps : {1e-6, 0.01, 0.5, 3.0}) {
    auto q = fixture::explicit_problem(3, 1, {1.0, 1.0, 1.0}, {0.5}, eps);
    CHECK(surrogate_objective(q, full) == doctest::Approx(3.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(surrogate_objective(p, std::vector<double>{0.1, -0.1, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(surrogate_objective(p, std::vector<double>{0.1}), DimensionError);
}

TEST_CASE("radiated cost adds an affine term") {
  NetworkScenario sc = fixture::explicit_problem(2, 1, {1.0, 1.0}, {0.5}).scenario();
  SwitchOffProblem p(std::make_shared<const NetworkScenario>(sc), Matrix(2, 1, 1.0), {1.0, 1.0},
                     {{2.0, 0.5}, {0.0, 0.25}}, 0.01, {});
  const std::vector<double> zero(2, 0.0);
  CHECK(surrogate_objective(p, zero) == doctest::Approx(0.75));
  const std::vector<double> rho{0.5, 0.0};
  CHECK(surrogate_objective(p, rho) == doctest::Approx(term(0.5, 0.01) + 1.5 + 0.25));
  CHECK_THROWS_AS(SwitchOffProblem(std::make_shared<const NetworkScenario>(sc), Matrix(2, 1, 1.0),
                                   {1.0, 1.0}, {{-1.0, 0.0}, {0.0, 0.0}}, 0.01, {}),
                  InvalidArgument);
}

TEST_CASE("surrogate approaches the count of nonzero loads") {
  const std::vector<double> rho{0.0, 0.5, 0.5, 0.0};
  auto at = [&](double eps) {
    auto p = fixture::explicit_problem(4, 1, {1, 1, 1, 1}, {0.5}, eps);
    return surrogate_objective(p, rho);
  };
  // Value at eps = 1e-6 from the direct formula: 2 * 0.949829...
  CHECK(at(1e-6) == doctest::Approx(2.0 * term(0.5, 1e-6)).epsilon(1e-14));
  CHECK(at(1e-6) == doctest::Approx(1.8996568201396944).epsilon(1e-12));
  // Error against the count shrinks as eps does.
  double prev = 2.0;
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-8, 1e-12, 1e-20}) {
    const double err = std::abs(at(eps) - 2.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(std::abs(at(1e-8) / 2.0 - 1.0) < 0.05);
}

TEST_CASE("majorizer touches and bounds the surrogate") {
  auto p = fixture::explicit_problem(5, 1, {1, 1, 1, 1, 1}, {0.5});
  Rng rng(17);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> rho(5), anchor(5);
    for (auto& r : rho) r = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
    for (auto& r : anchor) r = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
    CHECK(majorizer(p, rho, anchor) >= surrogate_objective(p, rho) - 1e-10);
    CHECK(majorizer(p, anchor, anchor) == doctest::Approx(surrogate_objective(p, anchor)).epsilon(1e-12));
  }
  const auto g = surrogate_gradient(p, std::vector<double>{0.0, 0.5, 1.0, 0.2, 0.0});
  CHECK(g[1] == doctest::Approx(1.0 / ((0.01 + 0.5) * std::log(101.0))));
}

TEST_CASE("single station takes everything") {
  auto p = fixture::explicit_problem(1, 3, {1.0, 2.0, 4.0}, {0.1, 0.2, 0.4});
  const auto s = mm_solve(p);
  CHECK(s.load[0] == doctest::Approx(0.1 + 0.1 + 0.1));
  REQUIRE(s.objective_history.size() >= 2);
  CHECK(s.objective_history[1] == doctest::Approx(s.objective_history[0]));
  CHECK(s.iterations_used == 1);
  check_relaxed_constraints(s, p);
}

TEST_CASE("two identical stations collapse onto one") {
  const auto p = two_identical(0.8);
  const auto s = mm_solve(p);
  CHECK(s.iterations_used <= 10);
  CHECK(std::min(s.load[0], s.load[1]) < 1e-3);
  check_relaxed_constraints(s, p);

  const auto plan = round_assignments(s, p);
  CHECK(plan.active.size() == 1);
  CHECK(plan.feasible);
  CHECK(exact_solve(p).active.size() == 1);
}

TEST_CASE("infeasible demand is reported") {
  // Minimal loads 0.9 + 0.9 + 0.9 > 2 stations.
  auto p = fixture::explicit_problem(2, 3, {1, 1, 1, 1, 1, 1}, {0.9, 0.9, 0.9});
  CHECK_THROWS_AS(mm_solve(p), InfeasibleError);
  CHECK_THROWS_AS(exact_solve(p), InfeasibleError);
}

TEST_CASE("relaxed-infeasible assignment despite a small total") {
  // Station 1 is useless for point 0; point 0 alone overloads station 0.
  auto p = fixture::explicit_problem(2, 2, {1.0, 1.0, 1e-3, 1.0}, {1.5, 0.1});
  CHECK_THROWS_AS(mm_solve(p), InfeasibleError);
}

TEST_CASE("descent on random instances") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto sc = fixture::calibrated_scenario(6, 30, seed, 2.5);
    const auto p = SwitchOffProblem::from_scenario(sc);
    const auto s = mm_solve(p);
    for (std::size_t k = 1; k < s.objective_history.size(); ++k) {
      CHECK(s.objective_history[k] <= s.objective_history[k - 1] + 1e-9);
    }
    check_relaxed_constraints(s, p);
    const auto plan = round_assignments(s, p);
    const auto exact = exact_solve(p);
    CHECK(plan.active.size() >= exact.active.size());
    CHECK(verify_plan(plan, p).feasible);
    CHECK(exact.feasible);
  }
}

TEST_CASE("rounding keeps integral feasible input") {
  auto p = fixture::explicit_problem(3, 3, std::vector<double>(9, 1.0), {0.3, 0.3, 0.3});
  RelaxedSolution s;
  s.assignment = load::AssignmentMatrix(3, 3);
  s.assignment(0, 0) = 1.0;
  s.assignment(2, 1) = 1.0;
  s.assignment(2, 2) = 1.0;
  s.load = p.loads(s.assignment);
  const auto plan = round_assignments(s, p);
  CHECK(plan.active == std::vector<std::size_t>{0, 2});
  CHECK(plan.assignment.entries() == s.assignment.entries());
}

TEST_CASE("rounding with an inactive threshold keeps every station") {
  // Each point is cheap only at its own station and too big to share one.
  auto p = fixture::explicit_problem(2, 2, {1.0, 0.1, 0.1, 1.0}, {0.6, 0.6});
  const auto s = mm_solve(p);
  RoundingOptions ro;
  ro.threshold = 0.0;
  const auto plan = round_assignments(s, p, ro);
  CHECK(plan.active.size() == 2);
}

TEST_CASE("rounding reactivates when the threshold cut too much") {
  auto p = fixture::explicit_problem(2, 2, std::vector<double>(4, 1.0), {0.6, 0.6});
  RelaxedSolution s;
  s.assignment = load::AssignmentMatrix(2, 2);
  s.assignment(0, 0) = 1.0;
  s.assignment(0, 1) = 0.5;
  s.assignment(1, 1) = 0.5;
  s.load = p.loads(s.assignment);
  RoundingOptions ro;
  ro.threshold = 0.5;  // station 1 (load 0.3) is switched off first
  const auto plan = round_assignments(s, p, ro);
  CHECK(plan.active.size() == 2);
  CHECK(plan.feasible);
}

TEST_CASE("exact enumeration") {
  SUBCASE("single station") {
    auto p = fixture::explicit_problem(1, 2, {1.0, 1.0}, {0.3, 0.3});
    CHECK(exact_solve(p).active == std::vector<std::size_t>{0});
  }
  SUBCASE("demand at total capacity needs every station") {
    auto p = fixture::explicit_problem(3, 3, std::vector<double>(9, 1.0), {1.0, 1.0, 1.0});
    const auto plan = exact_solve(p);
    CHECK(plan.active.size() == 3);
    for (double r : plan.load) CHECK(r == doctest::Approx(1.0));
  }
  SUBCASE("too many stations") {
    auto p = fixture::explicit_problem(13, 1, std::vector<double>(13, 1.0), {0.1});
    CHECK_THROWS_AS(exact_solve(p), InvalidArgument);
    ExactOptions eo;
    eo.max_stations = 13;
    CHECK(exact_solve(p, eo).active.size() == 1);
  }
  SUBCASE("ties go to the cheaper set") {
    NetworkScenario sc = fixture::explicit_problem(3, 1, {1, 1, 1}, {0.5}).scenario();
    SwitchOffProblem p(std::make_shared<const NetworkScenario>(sc), Matrix(3, 1, 1.0),
                       {3.0, 1.0, 2.0}, {}, 0.01, {});
    CHECK(exact_solve(p).active == std::vector<std::size_t>{1});
  }
}

TEST_CASE("energy report") {
  auto p = fixture::explicit_problem(3, 4, std::vector<double>(12, 1.0), {0.2, 0.2, 0.2, 0.2});
  const auto plan = round_assignments(mm_solve(p), p);
  const auto r = energy_report(plan, p);
  CHECK(r.active_count >= 1);
  CHECK(r.static_energy == doctest::Approx(static_cast<double>(r.active_count)));
  CHECK(r.radiated_energy == 0.0);
  CHECK(r.loads.size() == 3);
}

TEST_CASE("inactive stations carry nothing") {
  const auto sc = fixture::calibrated_scenario(5, 25, 3, 1.7);
  const auto p = SwitchOffProblem::from_scenario(sc);
  for (const auto& plan : {round_assignments(mm_solve(p), p), exact_solve(p)}) {
    std::vector<char> on(5, 0);
    for (auto i : plan.active) on[i] = 1;
    for (std::size_t i = 0; i < 5; ++i) {
      if (on[i]) continue;
      CHECK(plan.load[i] == 0.0);
      for (std::size_t j = 0; j < 25; ++j) CHECK(plan.assignment(i, j) == 0.0);
    }
    for (double r : plan.load) CHECK(r <= 1.0 + 1e-8);
  }
}

TEST_CASE("gain floor pruning keeps the best station") {
  const auto sc = fixture::calibrated_scenario(9, 40, 5, 2.0);
  ProblemOptions po;
  po.gain_floor_db = 0.0;
  const auto p = SwitchOffProblem::from_scenario(sc, po);
  for (std::size_t j = 0; j < 40; ++j) {
    std::size_t allowed = 0, best = 0;
    for (std::size_t i = 0; i < 9; ++i) {
      allowed += p.allowed(i, j) ? 1 : 0;
      if (sc->gains(i, j) > sc->gains(best, j)) best = i;
    }
    CHECK(allowed == 1);
    CHECK(p.allowed(best, j));
  }
  po.gain_floor_db = 15.0;
  const auto wider = SwitchOffProblem::from_scenario(sc, po);
  const auto s = mm_solve(wider);
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = 0; j < 40; ++j) {
      if (!wider.allowed(i, j)) CHECK(s.assignment(i, j) == 0.0);
    }
  }
}

TEST_CASE("problem validation") {
  NetworkScenario sc = fixture::explicit_problem(2, 1, {1.0, 1.0}, {0.5}).scenario();
  auto shared = std::make_shared<const NetworkScenario>(sc);
  CHECK_THROWS_AS(SwitchOffProblem(shared, Matrix(2, 1, 0.0), {1, 1}, {}, 0.01, {}), InvalidArgument);
  CHECK_THROWS_AS(SwitchOffProblem(shared, Matrix(2, 1, 1.0), {1, 1}, {}, 0.0, {}), InvalidArgument);
  CHECK_THROWS_AS(SwitchOffProblem(shared, Matrix(2, 2, 1.0), {1, 1}, {}, 0.01, {}), DimensionError);
  CHECK_THROWS_AS(SwitchOffProblem(shared, Matrix(2, 1, 1.0), {1, 1}, {}, 0.01, {0, 0}),
                  InvalidArgument);
}

}  // TEST_SUITE
