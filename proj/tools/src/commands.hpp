#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace netenergy::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,  // bad flags, config or input files
  kInfeasible = 3,
  kNumerical = 4,
};

struct GenerateConfig {
  std::size_t stations = 100;
  std::size_t test_points = 500;
  std::uint64_t seed = 1;
  double inter_site_distance = 500.0;
  double bandwidth = 100e6;
  std::size_t resource_units = 500;
  double tx_power = 40.0;
  double demand = 128e3;
  std::optional<double> efficiency_cap;
  std::filesystem::path output = "scenario.json";
};

struct SolveConfig {
  std::filesystem::path scenario;
  std::filesystem::path output_dir = ".";
  bool exact = false;
  std::size_t max_exact_stations = 12;
  double epsilon = 0.01;
  std::size_t iterations = 10;
  double threshold = 1e-3;
  std::optional<double> gain_floor_db;
  double radiated_slope = 0.0;
  double radiated_offset = 0.0;
};

struct CompareConfig {
  std::size_t stations = 10;
  std::vector<std::size_t> test_points{20, 40, 60, 80};
  std::uint64_t first_seed = 0;
  std::size_t seeds = 20;
  double epsilon = 0.01;
  std::size_t iterations = 10;
  std::size_t max_exact_stations = 12;
  std::size_t threads = 1;
  std::filesystem::path output_dir = ".";
};

struct SeriesSource {
  std::optional<std::filesystem::path> input;
  std::string kind = "voice";
  std::size_t weeks = 4;
  std::uint64_t seed = 1;
  double burstiness = 1.0;
};

struct ForecastConfig {
  SeriesSource source;
  std::size_t train_weeks = 3;
  std::size_t horizon = 0;  // 0: everything after the training window
  std::filesystem::path output = "forecast.csv";
};

struct ToleranceConfig {
  SeriesSource source;
  double p = 0.9;
  double risk = 0.05;
  std::filesystem::path output = "tolerance.csv";
};

int cmd_generate(const GenerateConfig& cfg);
int cmd_solve(const SolveConfig& cfg);
int cmd_compare(const CompareConfig& cfg);
int cmd_forecast(const ForecastConfig& cfg);
int cmd_tolerance(const ToleranceConfig& cfg);

}  // namespace netenergy::cli
