#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "netenergy/energyopt.hpp"
#include "netenergy/gp.hpp"
#include "netenergy/scenario.hpp"
#include "netenergy/traffic.hpp"

// File formats. Scenarios, problems and plans are JSON documents tagged with
// a schema name and version; series and results are CSV with a header row.
// Readers throw ParseError on malformed input.
namespace netenergy::io {

inline constexpr int kSchemaVersion = 1;

std::string scenario_to_json(const NetworkScenario& scenario);
NetworkScenario scenario_from_json(const std::string& text);

std::string problem_to_json(const energy::SwitchOffProblem& problem);
energy::SwitchOffProblem problem_from_json(const std::string& text);

std::string plan_to_json(const energy::SwitchOffPlan& plan);
energy::SwitchOffPlan plan_from_json(const std::string& text);

std::string report_to_json(const energy::EnergyReport& report, const energy::SwitchOffPlan& plan);

// Columns `hour,value`; hours must be evenly spaced.
traffic::TrafficSeries series_from_csv(const std::string& text,
                                       traffic::TrafficKind kind = traffic::TrafficKind::voice);
std::string series_to_csv(const traffic::TrafficSeries& series);

// Columns `hour,mean,std,lower,upper[,actual]`.
std::string forecast_to_csv(const traffic::GpForecast& forecast,
                            const std::vector<double>& actual = {});

// Columns `hour,samples,k,level,exceedance_probability,attainable,turning_points,z,reject_iid`.
std::string provisioning_to_csv(const std::vector<traffic::HourlyProvisioning>& rows);

std::string read_file(const std::filesystem::path& path);
// Writes via a temporary file in the same directory, then renames.
void write_file(const std::filesystem::path& path, const std::string& content);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

}  // namespace netenergy::io
