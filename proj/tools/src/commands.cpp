#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "netenergy/energyopt.hpp"
#include "netenergy/errors.hpp"
#include "netenergy/gp.hpp"
#include "netenergy/io.hpp"
#include "netenergy/scenario.hpp"
#include "netenergy/traffic.hpp"

namespace netenergy::cli {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

traffic::TrafficSeries load_series(const SeriesSource& src) {
  const auto kind = traffic::traffic_kind_from_string(src.kind);
  if (src.input) return io::series_from_csv(io::read_file(*src.input), kind);
  return traffic::generate_synthetic_traffic(kind, src.weeks, src.seed, src.burstiness);
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out + '\n';
}

std::string num(double v) { return io::format_double(v); }

// Mean and 1.96 standard errors.
std::pair<double, double> mean_ci(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return {mean, 1.96 * se};
}

}  // namespace

int cmd_generate(const GenerateConfig& cfg) {
  RadioParams params;
  params.inter_site_distance = cfg.inter_site_distance;
  params.bandwidth = cfg.bandwidth;
  params.resource_units = cfg.resource_units;
  params.tx_power = cfg.tx_power;
  params.demand = cfg.demand;
  params.spectral_efficiency_cap = cfg.efficiency_cap;
  const auto sc = generate_hex_scenario(cfg.stations, cfg.test_points, cfg.seed, params);
  io::write_file(cfg.output, io::scenario_to_json(sc));
  std::cout << "scenario: M=" << sc.num_stations() << " N=" << sc.num_test_points()
            << " region=" << num(sc.region_side) << "m x " << num(sc.region_side) << "m -> "
            << cfg.output.string() << '\n';
  return kOk;
}

int cmd_solve(const SolveConfig& cfg) {
  auto sc = std::make_shared<const NetworkScenario>(io::scenario_from_json(io::read_file(cfg.scenario)));

  energy::ProblemOptions po;
  po.epsilon = cfg.epsilon;
  po.gain_floor_db = cfg.gain_floor_db;
  if (cfg.radiated_slope != 0.0 || cfg.radiated_offset != 0.0) {
    po.radiated.assign(sc->num_stations(), {cfg.radiated_slope, cfg.radiated_offset});
  }
  const auto problem = energy::SwitchOffProblem::from_scenario(sc, po);

  const auto t0 = Clock::now();
  energy::SwitchOffPlan plan;
  if (cfg.exact) {
    energy::ExactOptions eo;
    eo.max_stations = cfg.max_exact_stations;
    plan = energy::exact_solve(problem, eo);
  } else {
    energy::MmOptions mo;
    mo.max_outer_iterations = cfg.iterations;
    energy::RoundingOptions ro;
    ro.threshold = cfg.threshold;
    plan = energy::round_assignments(energy::mm_solve(problem, mo), problem, ro);
  }
  const double ms = elapsed_ms(t0);

  const auto check = energy::verify_plan(plan, problem);
  const auto report = energy::energy_report(plan, problem);
  std::filesystem::create_directories(cfg.output_dir);
  io::write_file(cfg.output_dir / "plan.json", io::plan_to_json(plan));
  io::write_file(cfg.output_dir / "report.json", io::report_to_json(report, plan));

  std::cout << "method=" << plan.method << " active=" << report.active_count << "/"
            << problem.num_stations() << " static_energy=" << num(report.static_energy)
            << " radiated_energy=" << num(report.radiated_energy) << " time_ms=" << num(ms)
            << '\n';
  if (!check.feasible) {
    std::cerr << "plan does not pass the load check: " << check.reason << '\n';
    return kInfeasible;
  }
  return kOk;
}

int cmd_compare(const CompareConfig& cfg) {
  if (cfg.stations > cfg.max_exact_stations) {
    throw InvalidArgument("compare: " + std::to_string(cfg.stations) +
                          " stations exceeds the exact-search limit of " +
                          std::to_string(cfg.max_exact_stations));
  }
  if (cfg.seeds == 0) throw InvalidArgument("compare: need at least one seed");
  if (cfg.test_points.empty()) throw InvalidArgument("compare: need at least one N");

  struct Row {
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::size_t active_mm = 0, active_exact = 0;
    double time_mm = 0.0, time_exact = 0.0;
  };
  std::vector<Row> rows;
  for (std::size_t n : cfg.test_points) {
    for (std::size_t s = 0; s < cfg.seeds; ++s) rows.push_back({cfg.first_seed + s, n});
  }

  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto run_row = [&](Row& r) {
    try {
      auto sc = std::make_shared<const NetworkScenario>(generate_hex_scenario(cfg.stations, r.n, r.seed));
      energy::ProblemOptions po;
      po.epsilon = cfg.epsilon;
      const auto p = energy::SwitchOffProblem::from_scenario(sc, po);

      energy::MmOptions mo;
      mo.max_outer_iterations = cfg.iterations;
      auto t0 = Clock::now();
      const auto plan = energy::round_assignments(energy::mm_solve(p, mo), p);
      r.time_mm = elapsed_ms(t0);
      r.active_mm = plan.active.size();

      energy::ExactOptions eo;
      eo.max_stations = cfg.max_exact_stations;
      t0 = Clock::now();
      const auto exact = energy::exact_solve(p, eo);
      r.time_exact = elapsed_ms(t0);
      r.active_exact = exact.active.size();
    } catch (...) {
      std::lock_guard lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.threads, rows.size()));
  if (threads == 1) {
    for (auto& r : rows) run_row(r);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t k = t; k < rows.size(); k += threads) run_row(rows[k]);
      });
    }
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::string raw = "seed,N,active_mm,active_exact,time_mm_ms,time_exact_ms\n";
  std::map<std::size_t, std::vector<const Row*>> by_n;
  for (const auto& r : rows) {
    raw += csv_row({std::to_string(r.seed), std::to_string(r.n), std::to_string(r.active_mm),
                    std::to_string(r.active_exact), num(r.time_mm), num(r.time_exact)});
    by_n[r.n].push_back(&r);
  }

  std::string summary =
      "N,runs,active_mm_mean,active_mm_ci95,active_exact_mean,active_exact_ci95,"
      "time_mm_ms_mean,time_mm_ms_ci95,time_exact_ms_mean,time_exact_ms_ci95\n";
  for (const auto& [n, group] : by_n) {
    std::vector<double> am, ae, tm, te;
    for (const Row* r : group) {
      am.push_back(static_cast<double>(r->active_mm));
      ae.push_back(static_cast<double>(r->active_exact));
      tm.push_back(r->time_mm);
      te.push_back(r->time_exact);
    }
    const auto [am_m, am_c] = mean_ci(am);
    const auto [ae_m, ae_c] = mean_ci(ae);
    const auto [tm_m, tm_c] = mean_ci(tm);
    const auto [te_m, te_c] = mean_ci(te);
    summary += csv_row({std::to_string(n), std::to_string(group.size()), num(am_m), num(am_c),
                        num(ae_m), num(ae_c), num(tm_m), num(tm_c), num(te_m), num(te_c)});
    std::cout << "N=" << n << " active_mm=" << num(am_m) << " active_exact=" << num(ae_m)
              << " time_mm_ms=" << num(tm_m) << " time_exact_ms=" << num(te_m) << '\n';
  }

  std::filesystem::create_directories(cfg.output_dir);
  io::write_file(cfg.output_dir / "compare_raw.csv", raw);
  io::write_file(cfg.output_dir / "compare_summary.csv", summary);
  return kOk;
}

int cmd_forecast(const ForecastConfig& cfg) {
  const auto series = load_series(cfg.source);
  const std::size_t per_week = static_cast<std::size_t>(std::llround(168.0 / series.cadence_hours));
  const std::size_t train_len = cfg.train_weeks * per_week;
  if (train_len == 0 || series.size() < train_len) {
    throw InvalidArgument("forecast: series has " + std::to_string(series.size()) +
                          " samples, the training window needs " + std::to_string(train_len));
  }

  traffic::TrafficSeries train = series;
  train.values.resize(train_len);
  const std::vector<double> held_out(series.values.begin() + static_cast<std::ptrdiff_t>(train_len),
                                     series.values.end());
  const std::size_t horizon = cfg.horizon ? cfg.horizon : held_out.size();
  if (horizon == 0) throw InvalidArgument("forecast: nothing to forecast after the training window");

  const auto model = traffic::gp_fit(train, traffic::GpSpec::voice_default());
  const auto f = traffic::gp_predict(model, horizon);

  const std::size_t overlap = std::min(horizon, held_out.size());
  std::vector<double> actual(held_out.begin(), held_out.begin() + static_cast<std::ptrdiff_t>(overlap));
  if (overlap == horizon) {
    io::write_file(cfg.output, io::forecast_to_csv(f, actual));
  } else {
    io::write_file(cfg.output, io::forecast_to_csv(f));
  }

  std::cout << "trained on " << train_len << " samples, forecast " << horizon << " -> "
            << cfg.output.string() << '\n';
  std::cout << "hyperparameters:";
  const auto names = model.hyperparameter_names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    std::cout << ' ' << names[k] << '=' << num(model.hyperparameters()[k]);
  }
  std::cout << '\n';
  if (overlap > 0) {
    traffic::GpForecast head = f;
    head.mean.resize(overlap);
    head.std.resize(overlap);
    std::cout << "coverage " << num(traffic::band_coverage(head, actual)) << " over " << overlap
              << " held-out samples\n";
  }
  return kOk;
}

int cmd_tolerance(const ToleranceConfig& cfg) {
  const auto series = load_series(cfg.source);
  const auto rows = traffic::hourly_provisioning(series, cfg.p, cfg.risk);
  io::write_file(cfg.output, io::provisioning_to_csv(rows));
  std::size_t unattainable = 0, rejected = 0;
  for (const auto& r : rows) {
    unattainable += r.tolerance.attainable ? 0 : 1;
    rejected += r.turning_valid && r.turning.reject_iid ? 1 : 0;
  }
  std::cout << rows.size() << " hours -> " << cfg.output.string() << "; risk target missed at "
            << unattainable << " hours; i.i.d. rejected at " << rejected << " hours\n";
  return kOk;
}

}  // namespace netenergy::cli
