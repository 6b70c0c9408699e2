#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netenergy/loadmodel.hpp"
#include "netenergy/lp.hpp"
#include "netenergy/matrix.hpp"
#include "netenergy/scenario.hpp"

// Base-station switch-off planning.
//
// With efficiencies frozen at their worst case, station loads are linear in
// the assignment, rho_i = sum_j d_j x_ij / (K w_ij). The l0 count of active
// stations is replaced by the concave surrogate
//   sum_i c_i log(1 + rho_i / eps) / log(1 + 1 / eps),
// and majorization-minimization linearizes it at the current loads, leaving
// one LP per outer iteration. A rounding pass turns the fractional result
// into a discrete plan; exact_solve enumerates active sets for comparison.
namespace netenergy::energy {

// Radiated energy f_i(rho) = slope * rho + offset with slope >= 0.
struct RadiatedCost {
  double slope = 0.0;
  double offset = 0.0;

  double operator()(double rho) const { return slope * rho + offset; }
  friend bool operator==(const RadiatedCost&, const RadiatedCost&) = default;
};

inline constexpr double kDefaultEpsilon = 0.01;

struct ProblemOptions {
  double epsilon = kDefaultEpsilon;
  // Overrides the scenario's spectral-efficiency cap when set.
  std::optional<double> omega_cap;
  // Drop pairs whose gain is more than this many dB below the test point's
  // best gain. The best station always stays allowed.
  std::optional<double> gain_floor_db;
  // One per station; empty means no radiated cost.
  std::vector<RadiatedCost> radiated;
};

class SwitchOffProblem {
 public:
  static SwitchOffProblem from_scenario(std::shared_ptr<const NetworkScenario> scenario,
                                        const ProblemOptions& options = {});
  // Assemble from explicit parts (used when reading a problem file).
  SwitchOffProblem(std::shared_ptr<const NetworkScenario> scenario, Matrix efficiency,
                   std::vector<double> static_costs, std::vector<RadiatedCost> radiated,
                   double epsilon, std::vector<char> allowed);

  const NetworkScenario& scenario() const noexcept { return *scenario_; }
  std::shared_ptr<const NetworkScenario> scenario_ptr() const noexcept { return scenario_; }
  std::size_t num_stations() const noexcept { return efficiency_.rows(); }
  std::size_t num_test_points() const noexcept { return efficiency_.cols(); }

  // Worst-case efficiency w_ij.
  const Matrix& efficiency() const noexcept { return efficiency_; }
  std::span<const double> static_costs() const noexcept { return static_costs_; }
  std::span<const RadiatedCost> radiated() const noexcept { return radiated_; }
  double epsilon() const noexcept { return epsilon_; }
  bool allowed(std::size_t i, std::size_t j) const { return allowed_[i * num_test_points() + j] != 0; }
  std::span<const char> allowed_mask() const noexcept { return allowed_; }

  // d_j / (K w_ij): load on station i from fully serving test point j.
  double load_coefficient(std::size_t i, std::size_t j) const { return coeff_(i, j); }

  // Per-station loads of an assignment.
  load::LoadVector loads(const load::AssignmentMatrix& assignment) const;

  void validate() const;

 private:
  void build_coefficients();

  std::shared_ptr<const NetworkScenario> scenario_;
  Matrix efficiency_;
  Matrix coeff_;
  std::vector<double> static_costs_;
  std::vector<RadiatedCost> radiated_;
  double epsilon_ = kDefaultEpsilon;
  std::vector<char> allowed_;
};

// sum_i c_i (log(eps + rho_i) - log eps) / log(1 + 1/eps) + sum_i f_i(rho_i).
double surrogate_objective(const SwitchOffProblem& problem, std::span<const double> rho);

// Gradient of the concave part at rho: c_i / ((eps + rho_i) log(1 + 1/eps)).
std::vector<double> surrogate_gradient(const SwitchOffProblem& problem, std::span<const double> rho);

// First-order majorizer of the surrogate around `anchor`, evaluated at rho.
double majorizer(const SwitchOffProblem& problem, std::span<const double> rho,
                 std::span<const double> anchor);

struct RelaxedSolution {
  load::AssignmentMatrix assignment;
  load::LoadVector load;
  double surrogate_objective = 0.0;
  std::size_t iterations_used = 0;
  // Objective at the start point, then after each outer iteration.
  std::vector<double> objective_history;
};

struct MmOptions {
  std::size_t max_outer_iterations = 10;
  double stop_decrease = 1e-9;
  double descent_slack = 1e-9;
  lp::LpOptions lp;
};

// Majorization-minimization over the relaxed problem. Throws InfeasibleError
// when the relaxed constraints admit no point and InternalError if the
// objective ever increases beyond descent_slack.
RelaxedSolution mm_solve(const SwitchOffProblem& problem, const MmOptions& options = {});

struct SwitchOffPlan {
  std::vector<std::size_t> active;
  load::AssignmentMatrix assignment;
  load::LoadVector load;
  double total_static_energy = 0.0;
  double total_radiated_energy = 0.0;
  bool feasible = false;
  std::string method;
};

struct RoundingOptions {
  // Stations whose relaxed load falls below this are switched off.
  double threshold = 1e-3;
  // Usable capacity per station during greedy placement.
  double capacity = 1.0 - load::kFeasibilityMargin;
};

// Threshold-deactivate, then place test points greedily (largest demand
// first) on the active station with the best efficiency that still has room.
// A failed placement reactivates the switched-off station with the largest
// relaxed load and restarts.
SwitchOffPlan round_assignments(const RelaxedSolution& relaxed, const SwitchOffProblem& problem,
                                const RoundingOptions& options = {});

struct ExactOptions {
  std::size_t max_stations = 12;
  lp::LpOptions lp;
};

// Minimum-cardinality active set for the relaxed-assignment problem, by
// enumeration in increasing cardinality with an LP feasibility test per set.
// Ties at the optimal cardinality go to the lowest total energy.
SwitchOffPlan exact_solve(const SwitchOffProblem& problem, const ExactOptions& options = {});

struct EnergyReport {
  double static_energy = 0.0;
  double radiated_energy = 0.0;
  std::size_t active_count = 0;
  load::LoadVector loads;
};

EnergyReport energy_report(const SwitchOffPlan& plan, const SwitchOffProblem& problem);

// Load-limited fixed-point check of a plan under the worst-case efficiencies.
load::FeasibilityResult verify_plan(const SwitchOffPlan& plan, const SwitchOffProblem& problem,
                                    double tolerance = 1e-9);

}  // namespace netenergy::energy
