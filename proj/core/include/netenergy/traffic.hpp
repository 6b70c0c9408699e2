#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace netenergy::traffic {

enum class TrafficKind { voice, data };

std::string_view to_string(TrafficKind kind);
TrafficKind traffic_kind_from_string(std::string_view name);

// Normalized hourly KPI samples.
struct TrafficSeries {
  std::vector<double> values;
  double cadence_hours = 1.0;
  std::size_t start_offset = 0;  // hour-of-week of the first sample
  TrafficKind kind = TrafficKind::voice;

  void validate() const;
  std::size_t size() const noexcept { return values.size(); }
  // Hour index (from the start of the week) of sample t.
  double hour_of(std::size_t t) const {
    return static_cast<double>(start_offset) + cadence_hours * static_cast<double>(t);
  }
};

// ---------------------------------------------------------------------------
// Distribution-free tolerance levels from order statistics.

// P(F(X_{k:n}) > p) = 1 - sum_{i=k}^{n} C(n,i) p^i (1-p)^{n-i}, evaluated as
// the equivalent lower binomial tail sum_{i<k} (no cancellation). Exact for
// any continuous F.
double exceedance_probability(std::size_t n, std::size_t k, double p);

struct ToleranceResult {
  std::size_t k = 0;
  std::size_t n = 0;
  double level = 0.0;  // X_{k:n}
  double exceedance_probability = 0.0;
  double p = 0.0;
  bool attainable = true;  // false: even k = n misses the risk target
};

// Smallest k with exceedance_probability(n, k, p) <= risk; falls back to k = n
// with attainable = false.
ToleranceResult select_provisioning_level(std::span<const double> samples, double p, double risk);

struct TurningPointResult {
  std::size_t turning_points = 0;
  std::size_t effective_length = 0;  // after dropping tied neighbours
  double expected = 0.0;             // 2(n-2)/3
  double variance = 0.0;             // (16n-29)/90
  double z = 0.0;
  bool reject_iid = false;
};

// Turning point test for i.i.d. data at the given two-sided critical value.
// Consecutive equal values are collapsed before counting.
TurningPointResult turning_point_test(std::span<const double> series, double critical = 1.96);

// Samples split by hour of day (cadence must divide 24 evenly).
std::vector<std::vector<double>> group_by_hour_of_day(const TrafficSeries& series);

struct HourlyProvisioning {
  std::size_t hour = 0;
  ToleranceResult tolerance;
  TurningPointResult turning;  // only meaningful with >= 3 samples
  bool turning_valid = false;
};

std::vector<HourlyProvisioning> hourly_provisioning(const TrafficSeries& series, double p,
                                                    double risk);

// ---------------------------------------------------------------------------
// Synthetic traffic, standing in for per-cell KPI records.

struct SyntheticTrafficParams {
  double daily_amplitude = 0.35;
  double weekly_amplitude = 0.10;
  double baseline = 0.55;
  double noise_stddev = 0.04;
  // Data traffic bursts: Poisson arrivals at burst_rate * burstiness per
  // hour, Pareto amplitudes, geometric decay over a few hours.
  double burst_rate = 0.05;
  double burst_scale = 0.15;
  double burst_shape = 1.5;
  double burst_decay = 0.5;
};

// Voice: 24 h + 168 h sinusoids plus i.i.d. Gaussian noise, clipped at 0 and
// scaled to max 1. Data: the same base plus heavy-tailed bursts; with
// burstiness 0 it equals the voice series for the same seed.
TrafficSeries generate_synthetic_traffic(TrafficKind kind, std::size_t weeks, std::uint64_t seed,
                                         double burstiness = 1.0,
                                         const SyntheticTrafficParams& params = {});

// Sample autocorrelation at the given lag.
double autocorrelation(std::span<const double> values, std::size_t lag);

}  // namespace netenergy::traffic
