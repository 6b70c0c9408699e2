#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "netenergy/errors.hpp"
#include "netenergy/rng.hpp"
#include "netenergy/traffic.hpp"

namespace netenergy::traffic {

std::string_view to_string(TrafficKind kind) {
  return kind == TrafficKind::voice ? "voice" : "data";
}

TrafficKind traffic_kind_from_string(std::string_view name) {
  if (name == "voice") return TrafficKind::voice;
  if (name == "data") return TrafficKind::data;
  throw InvalidArgument("unknown traffic kind '" + std::string(name) + "' (expected voice|data)");
}

void TrafficSeries::validate() const {
  if (values.empty()) throw InvalidArgument("traffic series is empty");
  if (!(cadence_hours > 0.0)) throw InvalidArgument("traffic cadence must be > 0");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("traffic values must be finite and >= 0");
  }
}

TrafficSeries generate_synthetic_traffic(TrafficKind kind, std::size_t weeks, std::uint64_t seed,
                                         double burstiness, const SyntheticTrafficParams& params) {
  if (weeks < 1) throw InvalidArgument("generate_synthetic_traffic: weeks must be >= 1");
  if (!(burstiness >= 0.0)) throw InvalidArgument("generate_synthetic_traffic: burstiness must be >= 0");

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const std::size_t hours = weeks * 168;
  Rng root(seed);
  Rng noise = root.split(1);
  Rng bursts = root.split(2);

  std::vector<double> v(hours);
  for (std::size_t t = 0; t < hours; ++t) {
    const auto h = static_cast<double>(t);
    // Daily peak mid-afternoon, trough before dawn; weekly swing on top.
    v[t] = params.baseline + params.daily_amplitude * std::sin(two_pi * (h - 9.0) / 24.0) +
           params.weekly_amplitude * std::sin(two_pi * h / 168.0) +
           params.noise_stddev * noise.normal();
  }

  if (kind == TrafficKind::data && burstiness > 0.0) {
    const double rate = params.burst_rate * burstiness;
    double t = bursts.exponential(rate);
    while (t < static_cast<double>(hours)) {
      const double amplitude = bursts.pareto(params.burst_scale, params.burst_shape);
      double a = amplitude;
      for (auto s = static_cast<std::size_t>(t); s < hours && a > 1e-3 * amplitude; ++s) {
        v[s] += a;
        a *= params.burst_decay;
      }
      t += bursts.exponential(rate);
    }
  }

  double peak = 0.0;
  for (double& x : v) {
    x = std::max(0.0, x);
    peak = std::max(peak, x);
  }
  if (peak > 0.0) {
    for (double& x : v) x /= peak;
  }

  TrafficSeries s;
  s.values = std::move(v);
  s.kind = kind;
  return s;
}

double autocorrelation(std::span<const double> values, std::size_t lag) {
  const std::size_t n = values.size();
  if (lag >= n) throw InvalidArgument("autocorrelation: lag must be shorter than the series");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double denom = 0.0;
  for (double v : values) denom += (v - mean) * (v - mean);
  if (denom == 0.0) return 1.0;
  double num = 0.0;
  for (std::size_t t = 0; t + lag < n; ++t) num += (values[t] - mean) * (values[t + lag] - mean);
  return num / denom;
}

}  // namespace netenergy::traffic
