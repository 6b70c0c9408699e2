#include "netenergy/energyopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "netenergy/errors.hpp"

namespace netenergy::energy {

namespace {

constexpr double kLoadSlack = 1e-9;

void require_finite_nonnegative(std::span<const double> rho, const char* who) {
  for (double r : rho) {
    if (!std::isfinite(r) || r < 0.0) {
      throw InvalidArgument(std::string(who) + ": loads must be finite and >= 0");
    }
  }
}

void require_size(std::span<const double> rho, std::size_t m, const char* who) {
  if (rho.size() != m) throw DimensionError(std::string(who) + ": load vector length must equal M");
}

// Variables of an assignment LP: one per allowed (station, test point) pair
// over a subset of stations.
struct PairIndex {
  std::vector<std::size_t> station;
  std::vector<std::size_t> point;
};

PairIndex index_pairs(const SwitchOffProblem& p, std::span<const std::size_t> stations) {
  PairIndex idx;
  for (std::size_t i : stations) {
    for (std::size_t j = 0; j < p.num_test_points(); ++j) {
      if (p.allowed(i, j)) {
        idx.station.push_back(i);
        idx.point.push_back(j);
      }
    }
  }
  return idx;
}

// Constraints: sum_i x_ij = 1 per test point, rho_k <= 1 per listed station.
// `station_cost[k]` multiplies rho of stations[k] in the objective.
lp::LinearProgram assignment_lp(const SwitchOffProblem& p, std::span<const std::size_t> stations,
                                const PairIndex& idx, std::span<const double> station_cost,
                                double capacity = 1.0) {
  const std::size_t nv = idx.station.size();
  const std::size_t n = p.num_test_points();
  std::vector<std::size_t> slot(p.num_stations(), 0);
  for (std::size_t k = 0; k < stations.size(); ++k) slot[stations[k]] = k;

  lp::LinearProgram prog;
  prog.objective.assign(nv, 0.0);
  prog.a_ub = Matrix(stations.size(), nv);
  prog.b_ub.assign(stations.size(), capacity);
  prog.a_eq = Matrix(n, nv);
  prog.b_eq.assign(n, 1.0);
  for (std::size_t v = 0; v < nv; ++v) {
    const std::size_t i = idx.station[v];
    const std::size_t j = idx.point[v];
    const double a = p.load_coefficient(i, j);
    prog.a_ub(slot[i], v) = a;
    prog.a_eq(j, v) = 1.0;
    prog.objective[v] = station_cost.empty() ? 0.0 : station_cost[slot[i]] * a;
  }
  return prog;
}

// Minimise the largest load over `stations`; the extra last variable is that
// maximum.
std::optional<std::vector<double>> balanced_assignment(const SwitchOffProblem& p,
                                                       std::span<const std::size_t> stations,
                                                       const PairIndex& idx,
                                                       const lp::LpOptions& options) {
  auto prog = assignment_lp(p, stations, idx, {});
  const std::size_t nv = idx.station.size();
  Matrix a_ub(prog.a_ub.rows() + 1, nv + 1);
  for (std::size_t r = 0; r < prog.a_ub.rows(); ++r) {
    for (std::size_t v = 0; v < nv; ++v) a_ub(r, v) = prog.a_ub(r, v);
    a_ub(r, nv) = -1.0;
  }
  a_ub(prog.a_ub.rows(), nv) = 1.0;
  Matrix a_eq(prog.a_eq.rows(), nv + 1);
  for (std::size_t r = 0; r < prog.a_eq.rows(); ++r) {
    for (std::size_t v = 0; v < nv; ++v) a_eq(r, v) = prog.a_eq(r, v);
  }
  prog.a_ub = std::move(a_ub);
  prog.b_ub.assign(prog.a_ub.rows(), 0.0);
  prog.b_ub.back() = 1.0;
  prog.a_eq = std::move(a_eq);
  prog.objective.assign(nv + 1, 0.0);
  prog.objective[nv] = 1.0;
  const auto res = lp::lp_solve(prog, options);
  if (res.status != lp::LpStatus::optimal) return std::nullopt;
  return std::vector<double>(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(nv));
}

load::AssignmentMatrix assignment_from(const SwitchOffProblem& p, const PairIndex& idx,
                                       std::span<const double> x) {
  load::AssignmentMatrix a(p.num_stations(), p.num_test_points(), load::AssignmentMode::relaxed);
  for (std::size_t v = 0; v < x.size(); ++v) {
    a(idx.station[v], idx.point[v]) = std::clamp(x[v], 0.0, 1.0);
  }
  // Renormalise columns to remove simplex round-off.
  for (std::size_t j = 0; j < p.num_test_points(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.num_stations(); ++i) s += a(i, j);
    if (s > 0.0) {
      for (std::size_t i = 0; i < p.num_stations(); ++i) a(i, j) /= s;
    }
  }
  return a;
}

double log_norm(double eps) { return std::log1p(1.0 / eps); }

std::string join(std::span<const std::size_t> v) {
  std::ostringstream os;
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? " " : "") << v[k];
  return os.str();
}

double active_energy(const SwitchOffProblem& p, std::span<const std::size_t> active,
                     std::span<const double> load, double* radiated_out = nullptr) {
  double stat = 0.0, rad = 0.0;
  for (std::size_t i : active) {
    stat += p.static_costs()[i];
    rad += p.radiated()[i](load[i]);
  }
  if (radiated_out) *radiated_out = rad;
  return stat + rad;
}

}  // namespace

SwitchOffProblem::SwitchOffProblem(std::shared_ptr<const NetworkScenario> scenario,
                                   Matrix efficiency, std::vector<double> static_costs,
                                   std::vector<RadiatedCost> radiated, double epsilon,
                                   std::vector<char> allowed)
    : scenario_(std::move(scenario)),
      efficiency_(std::move(efficiency)),
      static_costs_(std::move(static_costs)),
      radiated_(std::move(radiated)),
      epsilon_(epsilon),
      allowed_(std::move(allowed)) {
  if (!scenario_) throw InvalidArgument("switch-off problem needs a scenario");
  if (radiated_.empty()) radiated_.assign(efficiency_.rows(), RadiatedCost{});
  if (allowed_.empty()) allowed_.assign(efficiency_.rows() * efficiency_.cols(), 1);
  validate();
  build_coefficients();
}

SwitchOffProblem SwitchOffProblem::from_scenario(std::shared_ptr<const NetworkScenario> scenario,
                                                 const ProblemOptions& options) {
  if (!scenario) throw InvalidArgument("switch-off problem needs a scenario");
  scenario->validate();
  const auto cap = options.omega_cap ? options.omega_cap : scenario->spectral_efficiency_cap;
  Matrix eff = load::worst_case_efficiency(*scenario, cap);

  const std::size_t m = scenario->num_stations();
  const std::size_t n = scenario->num_test_points();
  std::vector<double> costs(m);
  for (std::size_t i = 0; i < m; ++i) costs[i] = scenario->stations[i].static_energy;

  std::vector<char> allowed(m * n, 1);
  if (options.gain_floor_db) {
    if (!(*options.gain_floor_db >= 0.0)) throw InvalidArgument("gain floor must be >= 0 dB");
    const double ratio = std::pow(10.0, -*options.gain_floor_db / 10.0);
    for (std::size_t j = 0; j < n; ++j) {
      double best = 0.0;
      for (std::size_t i = 0; i < m; ++i) best = std::max(best, scenario->gains(i, j));
      for (std::size_t i = 0; i < m; ++i) {
        allowed[i * n + j] = scenario->gains(i, j) >= best * ratio ? 1 : 0;
      }
    }
  }
  return SwitchOffProblem(std::move(scenario), std::move(eff), std::move(costs), options.radiated,
                          options.epsilon, std::move(allowed));
}

void SwitchOffProblem::validate() const {
  const std::size_t m = efficiency_.rows();
  const std::size_t n = efficiency_.cols();
  if (m == 0) throw InvalidArgument("switch-off problem has no stations");
  if (m != scenario_->num_stations() || n != scenario_->num_test_points()) {
    throw DimensionError("efficiency matrix shape does not match the scenario");
  }
  for (double w : efficiency_.data()) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("worst-case efficiency must be > 0");
  }
  if (static_costs_.size() != m) throw DimensionError("static costs must have one entry per station");
  for (double c : static_costs_) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("static costs must be finite and >= 0");
  }
  if (radiated_.size() != m) throw DimensionError("radiated costs must have one entry per station");
  for (const auto& f : radiated_) {
    if (!(f.slope >= 0.0) || !std::isfinite(f.slope) || !std::isfinite(f.offset)) {
      throw InvalidArgument("radiated cost slope must be finite and >= 0");
    }
  }
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) throw InvalidArgument("epsilon must be > 0");
  if (allowed_.size() != m * n) throw DimensionError("allowed mask must be M x N");
  for (std::size_t j = 0; j < n; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < m && !any; ++i) any = allowed(i, j);
    if (!any) throw InvalidArgument("test point " + std::to_string(j) + " has no allowed station");
  }
}

void SwitchOffProblem::build_coefficients() {
  const auto& sc = *scenario_;
  const double k_units = static_cast<double>(sc.resource_units);
  coeff_ = Matrix(num_stations(), num_test_points());
  for (std::size_t i = 0; i < num_stations(); ++i) {
    for (std::size_t j = 0; j < num_test_points(); ++j) {
      coeff_(i, j) = sc.test_points[j].demand / (k_units * efficiency_(i, j));
    }
  }
}

load::LoadVector SwitchOffProblem::loads(const load::AssignmentMatrix& assignment) const {
  if (assignment.num_stations() != num_stations() ||
      assignment.num_test_points() != num_test_points()) {
    throw DimensionError("assignment shape does not match the problem");
  }
  load::LoadVector rho(num_stations(), 0.0);
  for (std::size_t i = 0; i < num_stations(); ++i) {
    for (std::size_t j = 0; j < num_test_points(); ++j) {
      const double x = assignment(i, j);
      if (x != 0.0) rho[i] += coeff_(i, j) * x;
    }
  }
  return rho;
}

double surrogate_objective(const SwitchOffProblem& problem, std::span<const double> rho) {
  require_size(rho, problem.num_stations(), "surrogate_objective");
  require_finite_nonnegative(rho, "surrogate_objective");
  const double eps = problem.epsilon();
  const double norm = log_norm(eps);
  double total = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    total += problem.static_costs()[i] * std::log1p(rho[i] / eps) / norm;
    total += problem.radiated()[i](rho[i]);
  }
  return total;
}

std::vector<double> surrogate_gradient(const SwitchOffProblem& problem,
                                       std::span<const double> rho) {
  require_size(rho, problem.num_stations(), "surrogate_gradient");
  require_finite_nonnegative(rho, "surrogate_gradient");
  const double eps = problem.epsilon();
  const double norm = log_norm(eps);
  std::vector<double> g(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    g[i] = problem.static_costs()[i] / ((eps + rho[i]) * norm);
  }
  return g;
}

double majorizer(const SwitchOffProblem& problem, std::span<const double> rho,
                 std::span<const double> anchor) {
  require_size(rho, problem.num_stations(), "majorizer");
  require_finite_nonnegative(rho, "majorizer");
  const auto grad = surrogate_gradient(problem, anchor);
  const double eps = problem.epsilon();
  const double norm = log_norm(eps);
  double total = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    total += problem.static_costs()[i] * std::log1p(anchor[i] / eps) / norm;
    total += grad[i] * (rho[i] - anchor[i]);
    total += problem.radiated()[i](rho[i]);
  }
  return total;
}

RelaxedSolution mm_solve(const SwitchOffProblem& problem, const MmOptions& options) {
  if (options.max_outer_iterations < 1) throw InvalidArgument("mm_solve: need at least one iteration");
  const std::size_t m = problem.num_stations();
  const std::size_t n = problem.num_test_points();

  // Every test point costs at least its cheapest load somewhere.
  double min_total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (problem.allowed(i, j)) best = std::min(best, problem.load_coefficient(i, j));
    }
    min_total += best;
  }
  if (min_total > static_cast<double>(m)) {
    std::ostringstream os;
    os << "total demand exceeds relaxed capacity: minimal load " << min_total << " > " << m
       << " stations";
    throw InfeasibleError(os.str());
  }

  RelaxedSolution sol;
  sol.assignment = load::AssignmentMatrix(m, n, load::AssignmentMode::relaxed);
  sol.load.assign(m, 0.0);
  if (n == 0) {
    sol.objective_history.push_back(surrogate_objective(problem, sol.load));
    sol.surrogate_objective = sol.objective_history.back();
    return sol;
  }

  std::vector<std::size_t> all(m);
  std::iota(all.begin(), all.end(), 0);
  const PairIndex idx = index_pairs(problem, all);

  for (std::size_t j = 0; j < n; ++j) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < m; ++i) count += problem.allowed(i, j) ? 1 : 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (problem.allowed(i, j)) sol.assignment(i, j) = 1.0 / static_cast<double>(count);
    }
  }
  sol.load = problem.loads(sol.assignment);

  auto solve_step = [&](std::span<const double> anchor) {
    auto weights = surrogate_gradient(problem, anchor);
    for (std::size_t i = 0; i < m; ++i) weights[i] += problem.radiated()[i].slope;
    const auto prog = assignment_lp(problem, all, idx, weights);
    const auto res = lp::lp_solve(prog, options.lp);
    if (res.status == lp::LpStatus::infeasible) {
      throw InfeasibleError("relaxed assignment LP is infeasible: demand exceeds capacity");
    }
    if (res.status != lp::LpStatus::optimal) {
      throw NumericalError("relaxed assignment LP ended with status " +
                           std::string(lp::to_string(res.status)));
    }
    sol.assignment = assignment_from(problem, idx, res.x);
    sol.load = problem.loads(sol.assignment);
  };

  const bool uniform_ok = std::all_of(sol.load.begin(), sol.load.end(),
                                      [](double r) { return r <= 1.0 + kLoadSlack; });
  if (!uniform_ok) solve_step(sol.load);  // project the uniform start onto the constraints

  double current = surrogate_objective(problem, sol.load);
  sol.objective_history.push_back(current);
  for (std::size_t it = 1; it <= options.max_outer_iterations; ++it) {
    const auto anchor = sol.load;
    const auto prev_assignment = sol.assignment;
    solve_step(anchor);
    const double next = surrogate_objective(problem, sol.load);
    if (next > current + options.descent_slack) {
      std::ostringstream os;
      os.precision(17);
      os << "MM objective increased at iteration " << it << ": " << current << " -> " << next;
      throw InternalError(os.str());
    }
    sol.objective_history.push_back(next);
    sol.iterations_used = it;
    const double decrease = current - next;
    current = std::min(current, next);
    if (next > sol.objective_history[it - 1]) {
      // Within slack but not lower: keep the previous point.
      sol.assignment = prev_assignment;
      sol.load = anchor;
    }
    if (decrease < options.stop_decrease) break;
  }
  sol.surrogate_objective = surrogate_objective(problem, sol.load);
  return sol;
}

SwitchOffPlan round_assignments(const RelaxedSolution& relaxed, const SwitchOffProblem& problem,
                                const RoundingOptions& options) {
  const std::size_t m = problem.num_stations();
  const std::size_t n = problem.num_test_points();
  if (relaxed.assignment.num_stations() != m || relaxed.assignment.num_test_points() != n ||
      relaxed.load.size() != m) {
    throw DimensionError("relaxed solution shape does not match the problem");
  }
  if (!(options.capacity > 0.0)) throw InvalidArgument("rounding capacity must be > 0");

  auto finish = [&](load::AssignmentMatrix assignment, std::string method) {
    SwitchOffPlan plan;
    plan.assignment = std::move(assignment);
    plan.load = problem.loads(plan.assignment);
    for (std::size_t i = 0; i < m; ++i) {
      bool used = false;
      for (std::size_t j = 0; j < n && !used; ++j) used = plan.assignment(i, j) > 0.0;
      if (used) plan.active.push_back(i);
    }
    active_energy(problem, plan.active, plan.load, &plan.total_radiated_energy);
    plan.total_static_energy = 0.0;
    for (std::size_t i : plan.active) plan.total_static_energy += problem.static_costs()[i];
    plan.method = std::move(method);
    const auto check = verify_plan(plan, problem);
    if (!check.feasible) {
      throw InternalError("rounded plan failed verification: " + check.reason);
    }
    plan.feasible = true;
    return plan;
  };

  // Integral input: keep it as is.
  bool integral = true;
  for (double v : relaxed.assignment.entries().data()) {
    if (v != 0.0 && v != 1.0) {
      integral = false;
      break;
    }
  }
  if (integral) {
    const auto rho = problem.loads(relaxed.assignment);
    if (std::all_of(rho.begin(), rho.end(), [&](double r) { return r <= options.capacity; })) {
      return finish(load::AssignmentMatrix(relaxed.assignment.entries(),
                                           load::AssignmentMode::discrete),
                    "mm+rounding");
    }
  }

  std::vector<char> active(m, 0);
  for (std::size_t i = 0; i < m; ++i) active[i] = relaxed.load[i] >= options.threshold ? 1 : 0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& tps = problem.scenario().test_points;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return tps[a].demand > tps[b].demand; });

  const double room = options.capacity * (1.0 - 1e-12);
  while (true) {
    std::vector<double> used(m, 0.0);
    std::vector<std::size_t> serving(n, m);
    bool placed_all = true;
    for (std::size_t j : order) {
      std::size_t pick = m;
      for (std::size_t i = 0; i < m; ++i) {
        if (!active[i] || !problem.allowed(i, j)) continue;
        if (used[i] + problem.load_coefficient(i, j) > room) continue;
        if (pick == m || problem.efficiency()(i, j) > problem.efficiency()(pick, j)) pick = i;
      }
      if (pick == m) {
        placed_all = false;
        break;
      }
      serving[j] = pick;
      used[pick] += problem.load_coefficient(pick, j);
    }
    if (placed_all) {
      return finish(load::AssignmentMatrix::from_serving(m, serving), "mm+rounding");
    }
    std::size_t revive = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (active[i]) continue;
      if (revive == m || relaxed.load[i] > relaxed.load[revive]) revive = i;
    }
    if (revive == m) {
      throw InfeasibleError("no feasible discrete plan even with every station active");
    }
    active[revive] = 1;
  }
}

SwitchOffPlan exact_solve(const SwitchOffProblem& problem, const ExactOptions& options) {
  const std::size_t m = problem.num_stations();
  const std::size_t n = problem.num_test_points();
  if (m > options.max_stations) {
    throw InvalidArgument("exact_solve refuses M = " + std::to_string(m) + " > limit " +
                          std::to_string(options.max_stations));
  }

  if (n == 0) {
    SwitchOffPlan empty;
    empty.assignment = load::AssignmentMatrix(m, 0, load::AssignmentMode::relaxed);
    empty.load.assign(m, 0.0);
    empty.feasible = true;
    empty.method = "exact";
    return empty;
  }

  bool any_slope = false;
  for (const auto& f : problem.radiated()) any_slope = any_slope || f.slope > 0.0;

  std::optional<SwitchOffPlan> best;
  double best_energy = std::numeric_limits<double>::infinity();

  for (std::size_t size = 1; size <= m && !best; ++size) {
    // Lexicographic combinations of `size` stations.
    std::vector<std::size_t> subset(size);
    std::iota(subset.begin(), subset.end(), 0);
    while (true) {
      bool possible = true;
      double min_total = 0.0;
      for (std::size_t j = 0; j < n && possible; ++j) {
        double cheapest = std::numeric_limits<double>::infinity();
        for (std::size_t i : subset) {
          if (problem.allowed(i, j)) cheapest = std::min(cheapest, problem.load_coefficient(i, j));
        }
        possible = std::isfinite(cheapest);
        min_total += cheapest;
      }
      possible = possible && min_total <= static_cast<double>(size) + kLoadSlack;

      if (possible) {
        const PairIndex idx = index_pairs(problem, subset);
        std::vector<double> slopes(size);
        for (std::size_t k = 0; k < size; ++k) slopes[k] = problem.radiated()[subset[k]].slope;
        auto prog = assignment_lp(problem, subset, idx, any_slope ? slopes : std::vector<double>{});
        lp::LpOptions lo = options.lp;
        lo.feasibility_only = !any_slope;
        const auto res = lp::lp_solve(prog, lo);
        if (res.status == lp::LpStatus::iteration_limit) {
          throw NumericalError("exact_solve: LP iteration limit on subset {" + join(subset) + "}");
        }
        if (res.status == lp::LpStatus::optimal) {
          SwitchOffPlan plan;
          plan.assignment = assignment_from(problem, idx, res.x);
          plan.load = problem.loads(plan.assignment);
          plan.active = subset;
          const double energy =
              active_energy(problem, plan.active, plan.load, &plan.total_radiated_energy);
          plan.total_static_energy = energy - plan.total_radiated_energy;
          plan.method = "exact";
          if (energy < best_energy) {
            best_energy = energy;
            best = std::move(plan);
          }
        }
      }

      // Advance to the next combination.
      std::size_t pos = size;
      while (pos > 0 && subset[pos - 1] == m - size + pos - 1) --pos;
      if (pos == 0) break;
      ++subset[pos - 1];
      for (std::size_t k = pos; k < size; ++k) subset[k] = subset[k - 1] + 1;
    }
  }
  if (!best) throw InfeasibleError("no subset of stations can carry the demand");
  if (!any_slope) {
    // A phase-one vertex tends to fill stations to the brim; spread the
    // load over the chosen set so it keeps headroom where there is any.
    const PairIndex idx = index_pairs(problem, best->active);
    if (auto x = balanced_assignment(problem, best->active, idx, options.lp)) {
      best->assignment = assignment_from(problem, idx, *x);
      best->load = problem.loads(best->assignment);
    }
  }
  best->feasible = verify_plan(*best, problem).feasible;
  return *best;
}

EnergyReport energy_report(const SwitchOffPlan& plan, const SwitchOffProblem& problem) {
  EnergyReport r;
  r.loads = problem.loads(plan.assignment);
  r.active_count = plan.active.size();
  for (std::size_t i : plan.active) {
    r.static_energy += problem.static_costs()[i];
    r.radiated_energy += problem.radiated()[i](r.loads[i]);
  }
  return r;
}

load::FeasibilityResult verify_plan(const SwitchOffPlan& plan, const SwitchOffProblem& problem,
                                    double tolerance) {
  load::FeasibilityOptions fo;
  fo.fixed_efficiency = problem.efficiency();
  return load::feasibility_check(problem.scenario(), plan.assignment, tolerance, fo);
}

}  // namespace netenergy::energy
