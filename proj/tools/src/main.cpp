#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "netenergy/errors.hpp"
#include "netenergy/ifcalc.hpp"

using namespace netenergy;
using namespace netenergy::cli;

namespace {

void add_series_source(CLI::App* cmd, SeriesSource& src, std::size_t default_weeks) {
  src.weeks = default_weeks;
  cmd->add_option("--input", src.input, "Series CSV (hour,value); synthetic data when omitted")
      ->check(CLI::ExistingFile);
  cmd->add_option("--kind", src.kind, "Traffic kind for synthetic data or CSV input")
      ->check(CLI::IsMember({"voice", "data"}))
      ->capture_default_str();
  cmd->add_option("--weeks", src.weeks, "Weeks of synthetic data")->capture_default_str();
  cmd->add_option("--seed", src.seed, "Seed for synthetic data")->capture_default_str();
  cmd->add_option("--burstiness", src.burstiness, "Burst intensity multiplier for data traffic")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "netenergy: load coupling, traffic forecasting and base-station switch-off.\n"
      "Options may also come from a config file (--config, INI/TOML style with one\n"
      "[section] per subcommand). Precedence: command-line flags > config file > defaults."};
  app.set_config("--config", "", "Read options from this config file");
  app.require_subcommand(1);
  bool verify = false;
  app.add_flag("--verify", verify,
               "Re-check mapping positivity and bounds on every evaluation (slow)");

  GenerateConfig gen;
  auto* g = app.add_subcommand("generate", "Write a hexagonal-layout scenario file");
  g->add_option("-m,--stations", gen.stations, "Number of base stations")->capture_default_str();
  g->add_option("-n,--test-points", gen.test_points, "Number of test points")->capture_default_str();
  g->add_option("--seed", gen.seed, "Placement seed")->capture_default_str();
  g->add_option("--isd", gen.inter_site_distance, "Inter-site distance, m")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  g->add_option("--bandwidth", gen.bandwidth, "Bandwidth per station, Hz")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  g->add_option("--resource-units", gen.resource_units, "Resource units per station")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  g->add_option("--tx-power", gen.tx_power, "Transmit power per station, W")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  g->add_option("--demand", gen.demand, "Rate per test point, bit/s")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  g->add_option("--efficiency-cap", gen.efficiency_cap, "Cap on spectral efficiency, bit/s per RU");
  g->add_option("-o,--output", gen.output, "Scenario file to write")->capture_default_str();

  SolveConfig sol;
  auto* s = app.add_subcommand("solve", "Choose which stations to switch off for a scenario");
  s->add_option("scenario,--scenario", sol.scenario, "Scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  s->add_option("-o,--output-dir", sol.output_dir, "Directory for plan.json and report.json")
      ->capture_default_str();
  s->add_flag("--exact", sol.exact, "Exhaustive search over active sets instead of MM + rounding");
  s->add_option("--max-exact-stations", sol.max_exact_stations, "Refuse exact search above this M")
      ->capture_default_str();
  s->add_option("--epsilon", sol.epsilon, "Log-surrogate smoothing parameter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s->add_option("--iterations", sol.iterations, "MM outer iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s->add_option("--threshold", sol.threshold, "Relaxed load below which a station is switched off")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  s->add_option("--gain-floor-db", sol.gain_floor_db,
                "Drop links more than this many dB below a test point's best link");
  s->add_option("--radiated-slope", sol.radiated_slope, "Radiated energy per unit load")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  s->add_option("--radiated-offset", sol.radiated_offset, "Radiated energy at zero load")
      ->capture_default_str();

  CompareConfig cmp;
  auto* c = app.add_subcommand("compare", "Sweep N and seeds, MM + rounding against exact search");
  c->add_option("-m,--stations", cmp.stations, "Number of base stations")->capture_default_str();
  c->add_option("-n,--test-points", cmp.test_points, "Values of N to sweep")
      ->delimiter(',')
      ->capture_default_str();
  c->add_option("--first-seed", cmp.first_seed, "First scenario seed")->capture_default_str();
  c->add_option("--seeds", cmp.seeds, "Number of seeds per N")->capture_default_str();
  c->add_option("--epsilon", cmp.epsilon, "Log-surrogate smoothing parameter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c->add_option("--iterations", cmp.iterations, "MM outer iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c->add_option("--max-exact-stations", cmp.max_exact_stations, "Refuse exact search above this M")
      ->capture_default_str();
  c->add_option("-j,--threads", cmp.threads, "Worker threads (timings are noisier above 1)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c->add_option("-o,--output-dir", cmp.output_dir,
                "Directory for compare_raw.csv and compare_summary.csv")
      ->capture_default_str();

  ForecastConfig fc;
  auto* f = app.add_subcommand("forecast", "Fit a periodic GP and forecast past the training window");
  add_series_source(f, fc.source, 4);
  f->add_option("--train-weeks", fc.train_weeks, "Weeks used for training")->capture_default_str();
  f->add_option("--horizon", fc.horizon, "Samples to forecast (0: the rest of the series)")
      ->capture_default_str();
  f->add_option("-o,--output", fc.output, "Forecast CSV")->capture_default_str();

  ToleranceConfig tc;
  auto* t = app.add_subcommand("tolerance", "Per-hour provisioning levels from order statistics");
  add_series_source(t, tc.source, 8);
  t->add_option("-p,--quantile", tc.p, "Target quantile p")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  t->add_option("--risk", tc.risk, "Acceptable exceedance probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  t->add_option("-o,--output", tc.output, "Provisioning CSV")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (verify) ifcalc::set_verification_mode(true);

  try {
    if (*g) return cmd_generate(gen);
    if (*s) return cmd_solve(sol);
    if (*c) return cmd_compare(cmp);
    if (*f) return cmd_forecast(fc);
    if (*t) return cmd_tolerance(tc);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: overloaded capacity: " << e.what() << '\n';
    return kInfeasible;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error& e) {
    // Remaining library errors are I/O (unwritable output and the like).
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
