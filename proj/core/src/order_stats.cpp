#include <algorithm>
#include <cmath>
#include <string>

#include "netenergy/errors.hpp"
#include "netenergy/traffic.hpp"

namespace netenergy::traffic {

namespace {

double log_binomial(std::size_t n, std::size_t i) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(i) + 1.0) -
         std::lgamma(static_cast<double>(n - i) + 1.0);
}

}  // namespace

double exceedance_probability(std::size_t n, std::size_t k, double p) {
  if (n == 0 || k < 1 || k > n) {
    throw InvalidArgument("exceedance_probability: need 1 <= k <= n (n=" + std::to_string(n) +
                          ", k=" + std::to_string(k) + ")");
  }
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("exceedance_probability: need 0 < p < 1");

  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  double sum = 0.0;
  if (n <= 60) {
    double coeff = 1.0;  // C(n, i), built multiplicatively
    for (std::size_t i = 0; i < k; ++i) {
      if (i > 0) coeff = coeff * static_cast<double>(n - i + 1) / static_cast<double>(i);
      sum += coeff * std::exp(static_cast<double>(i) * log_p + static_cast<double>(n - i) * log_q);
    }
  } else {
    for (std::size_t i = 0; i < k; ++i) {
      sum += std::exp(log_binomial(n, i) + static_cast<double>(i) * log_p +
                      static_cast<double>(n - i) * log_q);
    }
  }
  return std::clamp(sum, 0.0, 1.0);
}

ToleranceResult select_provisioning_level(std::span<const double> samples, double p, double risk) {
  if (samples.empty()) throw InvalidArgument("select_provisioning_level: no samples");
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("select_provisioning_level: need 0 < p < 1");
  if (!(risk > 0.0 && risk < 1.0)) {
    throw InvalidArgument("select_provisioning_level: need 0 < risk < 1");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  ToleranceResult r;
  r.n = n;
  r.p = p;
  for (std::size_t k = 1; k <= n; ++k) {
    const double e = exceedance_probability(n, k, p);
    if (e <= risk) {
      r.k = k;
      r.level = sorted[k - 1];
      r.exceedance_probability = e;
      r.attainable = true;
      return r;
    }
  }
  r.k = n;
  r.level = sorted.back();
  r.exceedance_probability = exceedance_probability(n, n, p);
  r.attainable = false;
  return r;
}

TurningPointResult turning_point_test(std::span<const double> series, double critical) {
  if (series.size() < 3) throw InvalidArgument("turning_point_test: need at least 3 samples");
  std::vector<double> y;
  y.reserve(series.size());
  for (double v : series) {
    if (y.empty() || v != y.back()) y.push_back(v);
  }
  if (y.size() < 3) {
    throw InvalidArgument("turning_point_test: fewer than 3 samples remain after removing ties");
  }
  TurningPointResult r;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const bool peak = y[i] > y[i - 1] && y[i] > y[i + 1];
    const bool trough = y[i] < y[i - 1] && y[i] < y[i + 1];
    if (peak || trough) ++r.turning_points;
  }
  const auto n = static_cast<double>(y.size());
  r.effective_length = y.size();
  r.expected = 2.0 * (n - 2.0) / 3.0;
  r.variance = (16.0 * n - 29.0) / 90.0;
  r.z = (static_cast<double>(r.turning_points) - r.expected) / std::sqrt(r.variance);
  r.reject_iid = std::abs(r.z) > critical;
  return r;
}

std::vector<std::vector<double>> group_by_hour_of_day(const TrafficSeries& series) {
  series.validate();
  const double per_day = 24.0 / series.cadence_hours;
  const auto slots = static_cast<std::size_t>(std::llround(per_day));
  if (slots == 0 || std::abs(per_day - static_cast<double>(slots)) > 1e-9) {
    throw InvalidArgument("group_by_hour_of_day: cadence must divide 24 hours");
  }
  std::vector<std::vector<double>> groups(slots);
  for (std::size_t t = 0; t < series.size(); ++t) {
    const double hour = std::fmod(series.hour_of(t), 24.0);
    const auto slot = static_cast<std::size_t>(std::llround(hour / series.cadence_hours)) % slots;
    groups[slot].push_back(series.values[t]);
  }
  return groups;
}

std::vector<HourlyProvisioning> hourly_provisioning(const TrafficSeries& series, double p,
                                                    double risk) {
  const auto groups = group_by_hour_of_day(series);
  std::vector<HourlyProvisioning> out;
  out.reserve(groups.size());
  for (std::size_t h = 0; h < groups.size(); ++h) {
    if (groups[h].empty()) continue;
    HourlyProvisioning row;
    row.hour = h;
    row.tolerance = select_provisioning_level(groups[h], p, risk);
    try {
      row.turning = turning_point_test(groups[h]);
      row.turning_valid = true;
    } catch (const InvalidArgument&) {
      row.turning_valid = false;
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace netenergy::traffic
