#include "netenergy/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "netenergy/errors.hpp"

namespace netenergy::io {

using nlohmann::json;

namespace {

constexpr const char* kScenarioSchema = "netenergy.scenario";
constexpr const char* kProblemSchema = "netenergy.problem";
constexpr const char* kPlanSchema = "netenergy.plan";

void check_header(const json& j, const char* schema) {
  if (!j.is_object()) throw ParseError(std::string(schema) + ": top level must be an object");
  if (j.value("schema", std::string{}) != schema) {
    throw ParseError(std::string("expected schema '") + schema + "'");
  }
  if (j.value("version", -1) != kSchemaVersion) {
    throw ParseError(std::string(schema) + ": unsupported version");
  }
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const char* what) {
  if (!j.is_array() || j.size() != rows) {
    throw ParseError(std::string(what) + ": expected " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols) {
      throw ParseError(std::string(what) + ": row " + std::to_string(r) + " must have " +
                       std::to_string(cols) + " entries");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw ParseError(std::string(what) + ": non-numeric entry");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad field '") + key + "': " + e.what());
  }
}

json scenario_json(const NetworkScenario& sc) {
  json j;
  j["schema"] = kScenarioSchema;
  j["version"] = kSchemaVersion;
  j["resource_units"] = sc.resource_units;
  j["bandwidth_per_ru"] = sc.bandwidth_per_ru;
  j["sinr_scaling"] = sc.sinr_scaling;
  j["noise_power"] = sc.noise_power;
  j["spectral_efficiency_cap"] =
      sc.spectral_efficiency_cap ? json(*sc.spectral_efficiency_cap) : json(nullptr);
  j["region_side"] = sc.region_side;
  json stations = json::array();
  for (const auto& s : sc.stations) {
    stations.push_back({{"id", s.id},
                        {"x", s.position.x},
                        {"y", s.position.y},
                        {"power_per_ru", s.power_per_ru},
                        {"static_energy", s.static_energy}});
  }
  j["stations"] = std::move(stations);
  json points = json::array();
  for (const auto& t : sc.test_points) {
    points.push_back(
        {{"id", t.id}, {"x", t.position.x}, {"y", t.position.y}, {"demand", t.demand}});
  }
  j["test_points"] = std::move(points);
  j["gains"] = matrix_to_json(sc.gains);
  return j;
}

NetworkScenario scenario_from(const json& j) {
  check_header(j, kScenarioSchema);
  NetworkScenario sc;
  sc.resource_units = field<std::size_t>(j, "resource_units");
  sc.bandwidth_per_ru = field<double>(j, "bandwidth_per_ru");
  sc.sinr_scaling = field<double>(j, "sinr_scaling");
  sc.noise_power = field<double>(j, "noise_power");
  if (j.contains("spectral_efficiency_cap") && !j["spectral_efficiency_cap"].is_null()) {
    sc.spectral_efficiency_cap = field<double>(j, "spectral_efficiency_cap");
  }
  sc.region_side = field<double>(j, "region_side");
  const auto stations = field<json>(j, "stations");
  if (!stations.is_array()) throw ParseError("'stations' must be an array");
  for (const auto& s : stations) {
    BaseStation b;
    b.id = field<std::size_t>(s, "id");
    b.position = {field<double>(s, "x"), field<double>(s, "y")};
    b.power_per_ru = field<double>(s, "power_per_ru");
    b.static_energy = field<double>(s, "static_energy");
    sc.stations.push_back(b);
  }
  const auto points = field<json>(j, "test_points");
  if (!points.is_array()) throw ParseError("'test_points' must be an array");
  for (const auto& p : points) {
    TestPoint t;
    t.id = field<std::size_t>(p, "id");
    t.position = {field<double>(p, "x"), field<double>(p, "y")};
    t.demand = field<double>(p, "demand");
    sc.test_points.push_back(t);
  }
  sc.gains = matrix_from_json(field<json>(j, "gains"), sc.stations.size(), sc.test_points.size(),
                              "gains");
  sc.validate();
  return sc;
}

json assignment_json(const load::AssignmentMatrix& a) {
  json j;
  j["mode"] = a.mode() == load::AssignmentMode::discrete ? "discrete" : "relaxed";
  j["covering"] = a.covering();
  j["entries"] = matrix_to_json(a.entries());
  return j;
}

load::AssignmentMatrix assignment_from(const json& j, std::size_t m, std::size_t n) {
  const auto mode_name = field<std::string>(j, "mode");
  load::AssignmentMode mode;
  if (mode_name == "discrete") {
    mode = load::AssignmentMode::discrete;
  } else if (mode_name == "relaxed") {
    mode = load::AssignmentMode::relaxed;
  } else {
    throw ParseError("assignment mode must be 'discrete' or 'relaxed'");
  }
  load::AssignmentMatrix a(matrix_from_json(field<json>(j, "entries"), m, n, "assignment"), mode,
                           j.value("covering", false));
  a.validate();
  return a;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != ' ' && c != '\t') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw InternalError("format_double: buffer too small");
  return std::string(buf, ptr);
}

std::string scenario_to_json(const NetworkScenario& scenario) {
  return scenario_json(scenario).dump(2) + "\n";
}

NetworkScenario scenario_from_json(const std::string& text) { return scenario_from(parse(text)); }

std::string problem_to_json(const energy::SwitchOffProblem& problem) {
  json j;
  j["schema"] = kProblemSchema;
  j["version"] = kSchemaVersion;
  j["scenario"] = scenario_json(problem.scenario());
  j["worst_case_efficiency"] = matrix_to_json(problem.efficiency());
  const auto costs = problem.static_costs();
  j["static_costs"] = std::vector<double>(costs.begin(), costs.end());
  json rad = json::array();
  for (const auto& f : problem.radiated()) rad.push_back({{"slope", f.slope}, {"offset", f.offset}});
  j["radiated"] = std::move(rad);
  j["epsilon"] = problem.epsilon();
  json mask = json::array();
  for (std::size_t i = 0; i < problem.num_stations(); ++i) {
    std::vector<int> row(problem.num_test_points());
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = problem.allowed(i, k) ? 1 : 0;
    mask.push_back(row);
  }
  j["allowed"] = std::move(mask);
  return j.dump(2) + "\n";
}

energy::SwitchOffProblem problem_from_json(const std::string& text) {
  const json j = parse(text);
  check_header(j, kProblemSchema);
  auto sc = std::make_shared<const NetworkScenario>(scenario_from(field<json>(j, "scenario")));
  const std::size_t m = sc->num_stations();
  const std::size_t n = sc->num_test_points();
  Matrix eff = matrix_from_json(field<json>(j, "worst_case_efficiency"), m, n,
                                "worst_case_efficiency");
  auto costs = field<std::vector<double>>(j, "static_costs");
  std::vector<energy::RadiatedCost> rad;
  const auto rad_j = field<json>(j, "radiated");
  if (!rad_j.is_array()) throw ParseError("'radiated' must be an array");
  for (const auto& f : rad_j) rad.push_back({field<double>(f, "slope"), field<double>(f, "offset")});
  const Matrix mask = matrix_from_json(field<json>(j, "allowed"), m, n, "allowed");
  std::vector<char> allowed(m * n);
  for (std::size_t k = 0; k < allowed.size(); ++k) {
    const double v = mask.data()[k];
    if (v != 0.0 && v != 1.0) throw ParseError("'allowed' entries must be 0 or 1");
    allowed[k] = v != 0.0 ? 1 : 0;
  }
  return energy::SwitchOffProblem(std::move(sc), std::move(eff), std::move(costs), std::move(rad),
                                  field<double>(j, "epsilon"), std::move(allowed));
}

std::string plan_to_json(const energy::SwitchOffPlan& plan) {
  json j;
  j["schema"] = kPlanSchema;
  j["version"] = kSchemaVersion;
  j["method"] = plan.method;
  j["feasible"] = plan.feasible;
  j["active"] = plan.active;
  j["num_stations"] = plan.assignment.num_stations();
  j["num_test_points"] = plan.assignment.num_test_points();
  j["assignment"] = assignment_json(plan.assignment);
  j["load"] = plan.load;
  j["total_static_energy"] = plan.total_static_energy;
  j["total_radiated_energy"] = plan.total_radiated_energy;
  return j.dump(2) + "\n";
}

energy::SwitchOffPlan plan_from_json(const std::string& text) {
  const json j = parse(text);
  check_header(j, kPlanSchema);
  energy::SwitchOffPlan plan;
  const auto m = field<std::size_t>(j, "num_stations");
  const auto n = field<std::size_t>(j, "num_test_points");
  plan.method = field<std::string>(j, "method");
  plan.feasible = field<bool>(j, "feasible");
  plan.active = field<std::vector<std::size_t>>(j, "active");
  for (std::size_t i : plan.active) {
    if (i >= m) throw ParseError("active station index out of range");
  }
  plan.assignment = assignment_from(field<json>(j, "assignment"), m, n);
  plan.load = field<std::vector<double>>(j, "load");
  if (plan.load.size() != m) throw ParseError("'load' must have one entry per station");
  plan.total_static_energy = field<double>(j, "total_static_energy");
  plan.total_radiated_energy = field<double>(j, "total_radiated_energy");
  return plan;
}

std::string report_to_json(const energy::EnergyReport& report, const energy::SwitchOffPlan& plan) {
  json j;
  j["method"] = plan.method;
  j["feasible"] = plan.feasible;
  j["active_count"] = report.active_count;
  j["active"] = plan.active;
  j["static_energy"] = report.static_energy;
  j["radiated_energy"] = report.radiated_energy;
  j["total_energy"] = report.static_energy + report.radiated_energy;
  j["loads"] = report.loads;
  return j.dump(2) + "\n";
}

traffic::TrafficSeries series_from_csv(const std::string& text, traffic::TrafficKind kind) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> hours, values;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 2) {
      throw ParseError("series line " + std::to_string(line_no) + ": expected 'hour,value'");
    }
    double h = 0.0, v = 0.0;
    if (!parse_number(fields[0], h) || !parse_number(fields[1], v)) {
      if (hours.empty() && values.empty() && line_no == 1) continue;  // header
      throw ParseError("series line " + std::to_string(line_no) + ": not numeric");
    }
    hours.push_back(h);
    values.push_back(v);
  }
  if (values.empty()) throw ParseError("series has no samples");

  traffic::TrafficSeries s;
  s.kind = kind;
  s.values = std::move(values);
  if (hours.size() > 1) s.cadence_hours = hours[1] - hours[0];
  if (!(s.cadence_hours > 0.0)) throw ParseError("series hours must increase");
  for (std::size_t t = 1; t < hours.size(); ++t) {
    const double step = hours[t] - hours[t - 1];
    if (std::abs(step - s.cadence_hours) > 1e-9 * std::max(1.0, std::abs(hours[t]))) {
      throw ParseError("series hours must be evenly spaced (row " + std::to_string(t + 1) + ")");
    }
  }
  if (hours[0] < 0.0 || hours[0] != std::floor(hours[0])) {
    throw ParseError("first hour must be a non-negative integer");
  }
  s.start_offset = static_cast<std::size_t>(hours[0]);
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid series: ") + e.what());
  }
  return s;
}

std::string series_to_csv(const traffic::TrafficSeries& series) {
  std::ostringstream os;
  os << "hour,value\n";
  for (std::size_t t = 0; t < series.size(); ++t) {
    os << format_double(series.hour_of(t)) << ',' << format_double(series.values[t]) << '\n';
  }
  return os.str();
}

std::string forecast_to_csv(const traffic::GpForecast& forecast, const std::vector<double>& actual) {
  if (!actual.empty() && actual.size() != forecast.times.size()) {
    throw DimensionError("forecast_to_csv: actual series length differs from forecast");
  }
  std::ostringstream os;
  os << "hour,mean,std,lower,upper";
  if (!actual.empty()) os << ",actual";
  os << '\n';
  for (std::size_t t = 0; t < forecast.times.size(); ++t) {
    const double mu = forecast.mean[t];
    const double sd = forecast.std[t];
    os << format_double(forecast.times[t]) << ',' << format_double(mu) << ','
       << format_double(sd) << ',' << format_double(mu - 1.96 * sd) << ','
       << format_double(mu + 1.96 * sd);
    if (!actual.empty()) os << ',' << format_double(actual[t]);
    os << '\n';
  }
  return os.str();
}

std::string provisioning_to_csv(const std::vector<traffic::HourlyProvisioning>& rows) {
  std::ostringstream os;
  os << "hour,samples,k,level,exceedance_probability,attainable,turning_points,z,reject_iid\n";
  for (const auto& r : rows) {
    os << r.hour << ',' << r.tolerance.n << ',' << r.tolerance.k << ','
       << format_double(r.tolerance.level) << ',' << format_double(r.tolerance.exceedance_probability)
       << ',' << (r.tolerance.attainable ? 1 : 0) << ',';
    if (r.turning_valid) {
      os << r.turning.turning_points << ',' << format_double(r.turning.z) << ','
         << (r.turning.reject_iid ? 1 : 0);
    } else {
      os << ",,";
    }
    os << '\n';
  }
  return os.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error("write failed for '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot write '" + path.string() + "'");
  }
}

}  // namespace netenergy::io
