#include "netenergy/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "netenergy/errors.hpp"
#include "netenergy/rng.hpp"

namespace netenergy {

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double RadioParams::noise_power() const {
  const double dbm = noise_density_dbm_hz + 10.0 * std::log10(bandwidth_per_ru()) + noise_figure_db;
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double path_loss_db(double distance_m, double min_distance) {
  const double d = std::max(distance_m, min_distance);
  return 128.1 + 37.6 * std::log10(d / 1000.0);
}

double gain_from_distance(double distance_m, double min_distance) {
  return std::pow(10.0, -path_loss_db(distance_m, min_distance) / 10.0);
}

Matrix compute_gains(std::span<const BaseStation> stations, std::span<const TestPoint> test_points,
                     double min_distance) {
  Matrix gains(stations.size(), test_points.size());
  for (std::size_t i = 0; i < stations.size(); ++i) {
    for (std::size_t j = 0; j < test_points.size(); ++j) {
      gains(i, j) = gain_from_distance(distance(stations[i].position, test_points[j].position),
                                       min_distance);
    }
  }
  return gains;
}

void NetworkScenario::validate() const {
  const std::size_t m = stations.size();
  const std::size_t n = test_points.size();
  if (m == 0) throw InvalidArgument("scenario has no base stations");
  if (n == 0) throw InvalidArgument("scenario has no test points");
  if (gains.rows() != m || gains.cols() != n) {
    throw DimensionError("gain matrix is " + std::to_string(gains.rows()) + "x" +
                         std::to_string(gains.cols()) + ", expected " + std::to_string(m) + "x" +
                         std::to_string(n));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto& s = stations[i];
    if (s.id != i) throw InvalidArgument("station ids must be contiguous from 0");
    if (!(s.power_per_ru > 0.0) || !std::isfinite(s.power_per_ru)) {
      throw InvalidArgument("station " + std::to_string(i) + ": power_per_ru must be > 0");
    }
    if (!(s.static_energy > 0.0) || !std::isfinite(s.static_energy)) {
      throw InvalidArgument("station " + std::to_string(i) + ": static_energy must be > 0");
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto& t = test_points[j];
    if (t.id != j) throw InvalidArgument("test point ids must be contiguous from 0");
    if (!(t.demand > 0.0) || !std::isfinite(t.demand)) {
      throw InvalidArgument("test point " + std::to_string(j) + ": demand must be > 0");
    }
  }
  for (double g : gains.data()) {
    if (!(g > 0.0) || !std::isfinite(g)) throw InvalidArgument("all gains must be finite and > 0");
  }
  if (resource_units < 1) throw InvalidArgument("resource_units must be >= 1");
  if (!(bandwidth_per_ru > 0.0)) throw InvalidArgument("bandwidth_per_ru must be > 0");
  if (!(sinr_scaling >= 1.0)) throw InvalidArgument("sinr_scaling must be >= 1");
  if (!(noise_power > 0.0)) throw InvalidArgument("noise_power must be > 0");
  if (spectral_efficiency_cap && !(*spectral_efficiency_cap > 0.0)) {
    throw InvalidArgument("spectral_efficiency_cap must be > 0 when present");
  }
}

NetworkScenario generate_hex_scenario(std::size_t m, std::size_t n, std::uint64_t seed,
                                      const RadioParams& params) {
  if (m == 0) throw InvalidArgument("station count must be positive");
  if (n == 0) throw InvalidArgument("test point count must be positive");
  if (!(params.inter_site_distance > 0.0)) throw InvalidArgument("inter_site_distance must be > 0");
  if (params.resource_units == 0) throw InvalidArgument("resource_units must be >= 1");
  if (!(params.bandwidth > 0.0) || !(params.tx_power > 0.0) || !(params.demand > 0.0) ||
      !(params.static_energy > 0.0)) {
    throw InvalidArgument("bandwidth, tx_power, demand and static_energy must be > 0");
  }

  const double isd = params.inter_site_distance;
  const double row_pitch = isd * std::sqrt(3.0) / 2.0;
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
  const std::size_t rows = (m + cols - 1) / cols;

  std::vector<Position> lattice;
  lattice.reserve(m);
  for (std::size_t r = 0; r < rows && lattice.size() < m; ++r) {
    const double shift = (r % 2 == 1) ? isd / 2.0 : 0.0;
    for (std::size_t c = 0; c < cols && lattice.size() < m; ++c) {
      lattice.push_back({static_cast<double>(c) * isd + shift, static_cast<double>(r) * row_pitch});
    }
  }

  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
  double min_y = min_x, max_y = -min_x;
  for (const auto& p : lattice) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double side = std::max(max_x - min_x, max_y - min_y) + isd;
  const double off_x = side / 2.0 - (min_x + max_x) / 2.0;
  const double off_y = side / 2.0 - (min_y + max_y) / 2.0;

  NetworkScenario sc;
  sc.region_side = side;
  sc.resource_units = params.resource_units;
  sc.bandwidth_per_ru = params.bandwidth_per_ru();
  sc.sinr_scaling = params.sinr_scaling;
  sc.noise_power = params.noise_power();
  sc.spectral_efficiency_cap = params.spectral_efficiency_cap;

  const double power_per_ru = params.tx_power / static_cast<double>(params.resource_units);
  sc.stations.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    sc.stations.push_back({i, {lattice[i].x + off_x, lattice[i].y + off_y}, power_per_ru,
                           params.static_energy});
  }

  Rng rng = Rng(seed).split(0x7e57);
  sc.test_points.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = rng.uniform(0.0, side);
    const double y = rng.uniform(0.0, side);
    sc.test_points.push_back({j, {x, y}, params.demand});
  }

  sc.gains = compute_gains(sc.stations, sc.test_points, params.min_distance);
  return sc;
}

}  // namespace netenergy
