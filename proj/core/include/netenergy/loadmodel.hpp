#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netenergy/ifcalc.hpp"
#include "netenergy/matrix.hpp"
#include "netenergy/scenario.hpp"

namespace netenergy::load {

enum class AssignmentMode { relaxed, discrete };

// M x N share of test point j served by station i. Columns sum to one.
class AssignmentMatrix {
 public:
  AssignmentMatrix() = default;
  AssignmentMatrix(std::size_t stations, std::size_t test_points,
                   AssignmentMode mode = AssignmentMode::relaxed, bool covering = false);
  AssignmentMatrix(Matrix entries, AssignmentMode mode, bool covering = false);

  // Discrete assignment from a serving-station index per test point.
  static AssignmentMatrix from_serving(std::size_t stations, std::span<const std::size_t> serving);
  // Every test point served by its strongest-gain station.
  static AssignmentMatrix best_server(const NetworkScenario& scenario);

  std::size_t num_stations() const noexcept { return entries_.rows(); }
  std::size_t num_test_points() const noexcept { return entries_.cols(); }
  AssignmentMode mode() const noexcept { return mode_; }
  bool covering() const noexcept { return covering_; }

  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  double& operator()(std::size_t i, std::size_t j) { return entries_(i, j); }
  const Matrix& entries() const noexcept { return entries_; }

  // Throws InvalidArgument if any invariant fails (column sums within tol).
  void validate(double tol = 1e-9) const;

  friend bool operator==(const AssignmentMatrix&, const AssignmentMatrix&) = default;

 private:
  Matrix entries_;
  AssignmentMode mode_ = AssignmentMode::relaxed;
  bool covering_ = false;
};

using LoadVector = std::vector<double>;

// B log2(1 + P_i g_ij / (eta (sum_{l != i} P_l g_lj rho_l + sigma^2))); rho has
// one entry per station.
double spectral_efficiency(const NetworkScenario& scenario, std::size_t i, std::size_t j,
                           std::span<const double> rho);

// Worst-case efficiency matrix: every interferer at full load, optionally
// capped at omega-bar.
Matrix worst_case_efficiency(const NetworkScenario& scenario,
                             std::optional<double> cap = std::nullopt);

// Interference mapping over the stations that serve positive demand. The
// mapping's coordinate k is station `stations[k]`; stations outside the
// list are treated as idle (zero load, no interference).
struct LoadMapping {
  ifcalc::InterferenceMapping mapping;
  std::vector<std::size_t> stations;

  // Expand a mapping-dimension vector to one entry per station.
  LoadVector expand(std::span<const double> reduced, std::size_t total_stations) const;
};

// Stations whose row of the assignment carries positive demand.
std::vector<std::size_t> serving_stations(const NetworkScenario& scenario,
                                          const AssignmentMatrix& assignment);

// I_i(rho) = sum_j d_j x_ij / (K omega_ij(rho)).
LoadMapping load_mapping(const NetworkScenario& scenario, const AssignmentMatrix& assignment);
// Same, over an explicit station list; listing a station with no served
// demand is a DimensionError.
LoadMapping load_mapping(const NetworkScenario& scenario, const AssignmentMatrix& assignment,
                         std::span<const std::size_t> stations);

// Each term becomes max{d_j x_ij / (K omega_ij(rho)), d_j x_ij / (K omega_cap)}.
LoadMapping capped_load_mapping(const NetworkScenario& scenario, const AssignmentMatrix& assignment,
                                double omega_cap);

// Load with the efficiency frozen at a given matrix (e.g. the worst case).
// Constant in rho, hence trivially standard and bounded.
LoadMapping fixed_efficiency_load_mapping(const NetworkScenario& scenario,
                                          const AssignmentMatrix& assignment,
                                          const Matrix& efficiency);

// min{J(rho), 1}: upper bounded by 1, so a fixed point always exists.
ifcalc::InterferenceMapping load_limited_mapping(const ifcalc::InterferenceMapping& inner);

inline constexpr double kFeasibilityMargin = 1e-6;

struct FeasibilityOptions {
  // Use the capped per-term efficiency (Example-2 style) with this cap.
  std::optional<double> omega_cap;
  // Freeze efficiencies instead of coupling them through the load.
  std::optional<Matrix> fixed_efficiency;
  double margin = kFeasibilityMargin;
  std::size_t max_iterations = 100000;
};

struct FeasibilityResult {
  bool feasible = false;
  LoadVector load;                       // one entry per station, 0 when idle
  std::vector<std::size_t> overloaded;   // station indices
  std::string reason;                    // empty when feasible
  ifcalc::FixedPointResult solve;        // on the load-limited mapping
  double uncapped_residual = 0.0;        // ||rho* - J(rho*)||_inf without the min{., 1}
};

// Solves the load-limited fixed point and declares the configuration
// feasible iff every load is <= 1 - margin and the cap never binds.
FeasibilityResult feasibility_check(const NetworkScenario& scenario,
                                    const AssignmentMatrix& assignment, double tolerance,
                                    const FeasibilityOptions& options = {});

}  // namespace netenergy::load
