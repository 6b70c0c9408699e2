#include "netenergy/loadmodel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "netenergy/errors.hpp"

namespace netenergy::load {

AssignmentMatrix::AssignmentMatrix(std::size_t stations, std::size_t test_points,
                                   AssignmentMode mode, bool covering)
    : entries_(stations, test_points, 0.0), mode_(mode), covering_(covering) {}

AssignmentMatrix::AssignmentMatrix(Matrix entries, AssignmentMode mode, bool covering)
    : entries_(std::move(entries)), mode_(mode), covering_(covering) {}

AssignmentMatrix AssignmentMatrix::from_serving(std::size_t stations,
                                                std::span<const std::size_t> serving) {
  AssignmentMatrix a(stations, serving.size(), AssignmentMode::discrete);
  for (std::size_t j = 0; j < serving.size(); ++j) {
    if (serving[j] >= stations) throw InvalidArgument("serving station index out of range");
    a(serving[j], j) = 1.0;
  }
  return a;
}

AssignmentMatrix AssignmentMatrix::best_server(const NetworkScenario& scenario) {
  std::vector<std::size_t> serving(scenario.num_test_points());
  for (std::size_t j = 0; j < serving.size(); ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scenario.num_stations(); ++i) {
      if (scenario.stations[i].power_per_ru * scenario.gains(i, j) >
          scenario.stations[best].power_per_ru * scenario.gains(best, j)) {
        best = i;
      }
    }
    serving[j] = best;
  }
  return from_serving(scenario.num_stations(), serving);
}

void AssignmentMatrix::validate(double tol) const {
  for (std::size_t j = 0; j < num_test_points(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < num_stations(); ++i) {
      const double v = entries_(i, j);
      if (!(v >= -tol && v <= 1.0 + tol)) {
        throw InvalidArgument("assignment entry outside [0, 1] at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
      }
      if (mode_ == AssignmentMode::discrete && v != 0.0 && v != 1.0) {
        throw InvalidArgument("discrete assignment entry is neither 0 nor 1");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol * std::max<double>(1.0, static_cast<double>(num_stations()))) {
      throw InvalidArgument("test point " + std::to_string(j) + " is not fully served (column sum " +
                            std::to_string(sum) + ")");
    }
  }
  if (covering_) {
    for (std::size_t i = 0; i < num_stations(); ++i) {
      const auto row = entries_.row(i);
      if (std::none_of(row.begin(), row.end(), [](double v) { return v > 0.0; })) {
        throw InvalidArgument("covering assignment leaves station " + std::to_string(i) + " idle");
      }
    }
  }
}

double spectral_efficiency(const NetworkScenario& scenario, std::size_t i, std::size_t j,
                           std::span<const double> rho) {
  if (rho.size() != scenario.num_stations()) {
    throw DimensionError("spectral_efficiency: load vector needs one entry per station");
  }
  double interference = 0.0;
  for (std::size_t l = 0; l < scenario.num_stations(); ++l) {
    if (l == i) continue;
    if (rho[l] < 0.0) throw InvalidArgument("spectral_efficiency: loads must be >= 0");
    interference += scenario.stations[l].power_per_ru * scenario.gains(l, j) * rho[l];
  }
  const double sinr = scenario.stations[i].power_per_ru * scenario.gains(i, j) /
                      (scenario.sinr_scaling * (interference + scenario.noise_power));
  return scenario.bandwidth_per_ru * std::log2(1.0 + sinr);
}

Matrix worst_case_efficiency(const NetworkScenario& scenario, std::optional<double> cap) {
  if (cap && !(*cap > 0.0)) throw InvalidArgument("efficiency cap must be > 0");
  const std::size_t m = scenario.num_stations();
  const std::size_t n = scenario.num_test_points();
  Matrix w(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const double own = scenario.stations[i].power_per_ru * scenario.gains(i, j);
      // Interference from every other station at full load.
      double interference = 0.0;
      for (std::size_t l = 0; l < m; ++l) {
        if (l != i) interference += scenario.stations[l].power_per_ru * scenario.gains(l, j);
      }
      const double sinr = own / (scenario.sinr_scaling * (interference + scenario.noise_power));
      double omega = scenario.bandwidth_per_ru * std::log2(1.0 + sinr);
      if (cap) omega = std::min(omega, *cap);
      w(i, j) = omega;
    }
  }
  return w;
}

LoadVector LoadMapping::expand(std::span<const double> reduced, std::size_t total_stations) const {
  if (reduced.size() != stations.size()) throw DimensionError("expand: wrong reduced dimension");
  LoadVector full(total_stations, 0.0);
  for (std::size_t k = 0; k < stations.size(); ++k) full[stations[k]] = reduced[k];
  return full;
}

std::vector<std::size_t> serving_stations(const NetworkScenario& scenario,
                                          const AssignmentMatrix& assignment) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < scenario.num_stations(); ++i) {
    double demand = 0.0;
    for (std::size_t j = 0; j < scenario.num_test_points(); ++j) {
      demand += scenario.test_points[j].demand * assignment(i, j);
    }
    if (demand > 0.0) out.push_back(i);
  }
  return out;
}

namespace {

void check_shapes(const NetworkScenario& scenario, const AssignmentMatrix& assignment) {
  if (assignment.num_stations() != scenario.num_stations() ||
      assignment.num_test_points() != scenario.num_test_points()) {
    throw DimensionError("assignment shape does not match the scenario");
  }
  assignment.validate();
}

// Precomputed data for the coupled load leaf.
struct CoupledLoad {
  struct Term {
    std::size_t k;  // mapping coordinate
    std::size_t j;
    double weight;  // d_j x_ij / K
    double signal;  // P_i g_ij
  };
  std::vector<Term> terms;
  Matrix rx;  // |S| x N received power per RU, P_s g_sj
  double bandwidth = 1.0;
  double eta = 1.0;
  double noise = 1.0;
  std::optional<double> cap;

  void operator()(std::span<const double> rho, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (const Term& t : terms) {
      // Summed directly rather than as total-minus-own to avoid cancellation.
      double interference = 0.0;
      for (std::size_t k = 0; k < rx.rows(); ++k) {
        if (k != t.k) interference += rx(k, t.j) * rho[k];
      }
      const double sinr = t.signal / (eta * (interference + noise));
      double omega = bandwidth * std::log2(1.0 + sinr);
      if (cap) omega = std::min(omega, *cap);
      out[t.k] += t.weight / omega;
    }
  }
};

LoadMapping build_coupled(const NetworkScenario& scenario, const AssignmentMatrix& assignment,
                          std::span<const std::size_t> stations, std::optional<double> cap,
                          const char* label) {
  if (stations.empty()) throw DimensionError("load mapping has no serving stations");
  auto data = std::make_shared<CoupledLoad>();
  const std::size_t n = scenario.num_test_points();
  const double k_units = static_cast<double>(scenario.resource_units);
  data->rx = Matrix(stations.size(), n);
  data->bandwidth = scenario.bandwidth_per_ru;
  data->eta = scenario.sinr_scaling;
  data->noise = scenario.noise_power;
  data->cap = cap;
  for (std::size_t k = 0; k < stations.size(); ++k) {
    const std::size_t i = stations[k];
    if (i >= scenario.num_stations()) throw InvalidArgument("station index out of range");
    const double p = scenario.stations[i].power_per_ru;
    bool serves = false;
    for (std::size_t j = 0; j < n; ++j) {
      data->rx(k, j) = p * scenario.gains(i, j);
      const double x = assignment(i, j);
      if (x > 0.0) {
        serves = true;
        data->terms.push_back({k, j, scenario.test_points[j].demand * x / k_units, data->rx(k, j)});
      }
    }
    if (!serves) {
      throw DimensionError("station " + std::to_string(i) +
                           " serves no demand, so its load function would be identically zero; "
                           "drop it from the station list (serving_stations() does this)");
    }
  }
  LoadMapping out{ifcalc::InterferenceMapping::leaf(
                      stations.size(),
                      [data](std::span<const double> rho, std::span<double> o) { (*data)(rho, o); },
                      std::nullopt, label),
                  std::vector<std::size_t>(stations.begin(), stations.end())};
  return out;
}

}  // namespace

LoadMapping load_mapping(const NetworkScenario& scenario, const AssignmentMatrix& assignment) {
  check_shapes(scenario, assignment);
  const auto stations = serving_stations(scenario, assignment);
  return build_coupled(scenario, assignment, stations, std::nullopt, "load");
}

LoadMapping load_mapping(const NetworkScenario& scenario, const AssignmentMatrix& assignment,
                         std::span<const std::size_t> stations) {
  check_shapes(scenario, assignment);
  return build_coupled(scenario, assignment, stations, std::nullopt, "load");
}

LoadMapping capped_load_mapping(const NetworkScenario& scenario, const AssignmentMatrix& assignment,
                                double omega_cap) {
  if (!(omega_cap > 0.0)) throw InvalidArgument("spectral efficiency cap must be > 0");
  check_shapes(scenario, assignment);
  const auto stations = serving_stations(scenario, assignment);
  return build_coupled(scenario, assignment, stations, omega_cap, "capped_load");
}

LoadMapping fixed_efficiency_load_mapping(const NetworkScenario& scenario,
                                          const AssignmentMatrix& assignment,
                                          const Matrix& efficiency) {
  check_shapes(scenario, assignment);
  if (efficiency.rows() != scenario.num_stations() ||
      efficiency.cols() != scenario.num_test_points()) {
    throw DimensionError("efficiency matrix shape does not match the scenario");
  }
  const auto stations = serving_stations(scenario, assignment);
  if (stations.empty()) throw DimensionError("load mapping has no serving stations");
  ifcalc::Vector loads(stations.size(), 0.0);
  const double k_units = static_cast<double>(scenario.resource_units);
  for (std::size_t k = 0; k < stations.size(); ++k) {
    const std::size_t i = stations[k];
    for (std::size_t j = 0; j < scenario.num_test_points(); ++j) {
      const double x = assignment(i, j);
      if (x > 0.0) {
        if (!(efficiency(i, j) > 0.0)) throw InvalidArgument("efficiency must be > 0 where assigned");
        loads[k] += scenario.test_points[j].demand * x / (k_units * efficiency(i, j));
      }
    }
  }
  return {ifcalc::InterferenceMapping::constant(std::move(loads)), stations};
}

ifcalc::InterferenceMapping load_limited_mapping(const ifcalc::InterferenceMapping& inner) {
  return ifcalc::cap(inner, 1.0);
}

FeasibilityResult feasibility_check(const NetworkScenario& scenario,
                                    const AssignmentMatrix& assignment, double tolerance,
                                    const FeasibilityOptions& options) {
  if (!(tolerance > 0.0)) throw InvalidArgument("feasibility_check: tolerance must be > 0");
  LoadMapping lm = [&] {
    if (options.fixed_efficiency) {
      return fixed_efficiency_load_mapping(scenario, assignment, *options.fixed_efficiency);
    }
    const auto cap = options.omega_cap ? options.omega_cap : scenario.spectral_efficiency_cap;
    if (cap) return capped_load_mapping(scenario, assignment, *cap);
    return load_mapping(scenario, assignment);
  }();

  const auto limited = load_limited_mapping(lm.mapping);
  ifcalc::FixedPointOptions fp;
  fp.tolerance = tolerance;
  fp.max_iterations = options.max_iterations;

  FeasibilityResult r;
  r.solve = ifcalc::fixed_point(limited, fp);
  const auto& rho = r.solve.fixed_point;
  const auto uncapped = lm.mapping(rho);
  r.uncapped_residual = ifcalc::sup_distance(rho, uncapped);
  r.load = lm.expand(rho, scenario.num_stations());

  const double limit = 1.0 - options.margin;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    if (rho[k] > limit || uncapped[k] > limit) r.overloaded.push_back(lm.stations[k]);
  }
  r.feasible = r.overloaded.empty() && r.uncapped_residual <= 10.0 * tolerance;
  if (!r.feasible) {
    std::ostringstream os;
    if (!r.overloaded.empty()) {
      os << "overloaded capacity at station(s)";
      for (auto s : r.overloaded) os << ' ' << s;
      os << " (load would exceed " << limit << ")";
    } else {
      os << "load cap binding at the fixed point (residual " << r.uncapped_residual << ")";
    }
    r.reason = os.str();
  }
  return r;
}

}  // namespace netenergy::load
