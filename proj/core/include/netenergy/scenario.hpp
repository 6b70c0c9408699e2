#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "netenergy/matrix.hpp"

namespace netenergy {

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;  // meters

  friend bool operator==(const Position&, const Position&) = default;
};

double distance(const Position& a, const Position& b);

struct BaseStation {
  std::size_t id = 0;
  Position position;
  double power_per_ru = 0.0;   // W per resource unit
  double static_energy = 0.0;  // operating cost c_i, W

  friend bool operator==(const BaseStation&, const BaseStation&) = default;
};

struct TestPoint {
  std::size_t id = 0;
  Position position;
  double demand = 0.0;  // required rate d_j, bit/s

  friend bool operator==(const TestPoint&, const TestPoint&) = default;
};

// The world a switch-off decision acts on. Immutable once built; validate()
// checks every invariant and throws InvalidArgument/DimensionError.
struct NetworkScenario {
  std::vector<BaseStation> stations;
  std::vector<TestPoint> test_points;
  Matrix gains;                 // M x N linear power gains g_{i,j}
  std::size_t resource_units = 1;  // K
  double bandwidth_per_ru = 1.0;   // B, Hz
  double sinr_scaling = 1.0;       // eta >= 1
  double noise_power = 1.0;        // sigma^2, W
  std::optional<double> spectral_efficiency_cap;  // omega-bar, bit/s per RU
  double region_side = 0.0;        // side of the square deployment region, m

  std::size_t num_stations() const noexcept { return stations.size(); }
  std::size_t num_test_points() const noexcept { return test_points.size(); }

  void validate() const;

  friend bool operator==(const NetworkScenario&, const NetworkScenario&) = default;
};

// Knobs for generate_hex_scenario. Defaults describe a 100 MHz LTE-like macro
// layer with 128 kbit/s per test point.
struct RadioParams {
  double inter_site_distance = 500.0;  // m
  double bandwidth = 100e6;            // Hz per station
  std::size_t resource_units = 500;    // K
  double tx_power = 40.0;              // W per station, spread evenly over K
  double sinr_scaling = 1.0;
  double noise_density_dbm_hz = -174.0;
  double noise_figure_db = 9.0;
  double demand = 128e3;        // bit/s per test point
  double static_energy = 1.0;   // c_i, identical across stations
  double min_distance = 35.0;   // m, path-loss distance floor
  std::optional<double> spectral_efficiency_cap;

  double bandwidth_per_ru() const { return bandwidth / static_cast<double>(resource_units); }
  // Thermal noise over one resource unit, W.
  double noise_power() const;
};

inline constexpr double kMinDistance = 35.0;

// Urban-macro path loss in dB, L(d) = 128.1 + 37.6 log10(d / 1 km), with d
// floored at min_distance meters.
double path_loss_db(double distance_m, double min_distance = kMinDistance);
double gain_from_distance(double distance_m, double min_distance = kMinDistance);

Matrix compute_gains(std::span<const BaseStation> stations, std::span<const TestPoint> test_points,
                     double min_distance = kMinDistance);

// Stations on a hexagonal lattice (inter-site distance from params) centred
// in a square region; test points uniform in that region. Bit-identical for
// identical arguments.
NetworkScenario generate_hex_scenario(std::size_t m, std::size_t n, std::uint64_t seed,
                                      const RadioParams& params = {});

}  // namespace netenergy
