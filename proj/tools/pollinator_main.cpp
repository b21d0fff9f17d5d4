// pollinator — scenario-driven front end for the trip simulator and the
// analytics pipelines. Subcommands: simulate | expect | revenue | sensitivity
// | hetero | pool-compare. Exit codes: 0 success, 2 invalid config or data,
// 1 internal/runtime error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pollinator/errors.hpp"
#include "pollinator/expectation.hpp"
#include "pollinator/heterogeneity.hpp"
#include "pollinator/revenue.hpp"
#include "pollinator/scenario.hpp"
#include "pollinator/trip_engine.hpp"

namespace fs = std::filesystem;
using namespace pollinator;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trips;
  std::optional<int> cutoff;
  std::optional<int> workers;
};

fs::path resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("POLLINATOR_OUT_DIR"); env && *env) return env;
  return "out";
}

void write_file(const fs::path& dir, const std::string& name, const std::string& contents) {
  fs::create_directories(dir);
  fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw std::runtime_error("short write to '" + path.string() + "'");
  std::cout << path.string() << "\n";
}

template <typename T>
void apply_override(std::optional<T> flag, T& target, const char* name) {
  if (!flag) return;
  if (*flag != target) {
    std::cerr << "note: --" << name << " overrides config value (" << target << " -> "
              << *flag << ")\n";
  }
  target = *flag;
}

// Loads the scenario, applies flag overrides, and runs landscape validation.
// Validation diagnostics go to stderr and abort with exit 2.
ScenarioConfig load_checked(const CommonArgs& args) {
  ScenarioConfig config = load_scenario(args.config_path);
  apply_override(args.seed, config.run.master_seed, "seed");
  apply_override(args.trips, config.run.trips, "trips");
  apply_override(args.cutoff, config.run.depth_cutoff, "cutoff");
  apply_override(args.workers, config.run.workers, "workers");

  auto diagnostics = validate_landscape(config.landscape);
  if (!diagnostics.empty()) {
    for (const auto& d : diagnostics) {
      std::cerr << "error: " << d.code << (d.subject.empty() ? "" : " [" + d.subject + "]")
                << ": " << d.message << "\n";
    }
    throw Error(ErrorCode::ConfigError, "landscape validation failed");
  }
  return config;
}

PlatformWeights start_weights(const ScenarioConfig& config) {
  auto landing = landing_distribution(config.landscape, config.start.personality,
                                      config.start.platform);
  PlatformWeights weights;
  for (const auto& c : landing.choices) weights.emplace_back(c.platform, c.probability);
  return weights;
}

McOptions mc_options(const ScenarioConfig& config) {
  McOptions options;
  options.depth_cutoff = config.run.depth_cutoff;
  options.workers = config.run.workers;
  return options;
}

int cmd_simulate(const CommonArgs& args, bool trace) {
  ScenarioConfig config = load_checked(args);
  fs::path out_dir = resolve_out_dir(args.out_dir);

  McOptions options = mc_options(config);
  std::string trace_body;
  if (trace) {
    trace_body = trace_header_line() + "\n";
    options.trace = [&trace_body](const TripRecord& record) {
      trace_body += to_json_line(record) + "\n";
    };
  }

  TrafficReport report = run_monte_carlo(config.landscape, config.start, config.run.trips,
                                         config.run.master_seed, options);
  write_file(out_dir, "traffic_report.json", to_json_string(report));
  if (trace) write_file(out_dir, "trips.jsonl", trace_body);
  return kExitOk;
}

int cmd_expect(const CommonArgs& args, int sweep) {
  ScenarioConfig config = load_checked(args);
  fs::path out_dir = resolve_out_dir(args.out_dir);

  ExpectationReport report;
  report.recursive = expected_time_recursive(config.landscape, config.start,
                                             config.run.depth_cutoff);
  report.collapsed = expected_time_collapsed(config.landscape, start_weights(config),
                                             AlphaSum::exact());
  report.divergence = std::abs(report.collapsed.value_seconds - report.recursive.value_seconds);
  for (int cutoff = 0; cutoff <= sweep; ++cutoff) {
    report.cutoff_sweep.push_back(
        expected_time_recursive(config.landscape, config.start, cutoff));
  }
  write_file(out_dir, "expectation.json", to_json_string(report));
  return kExitOk;
}

int cmd_revenue(const std::string& csv_path, const CommonArgs& args,
                std::optional<double> cpc, std::optional<double> cpm) {
  fs::path out_dir = resolve_out_dir(args.out_dir);
  RevenueParams params;
  if (!args.config_path.empty()) {
    params = load_scenario(args.config_path).revenue;
  }
  apply_override(cpc, params.cpc, "cpc");
  apply_override(cpm, params.cpm, "cpm");

  auto rows = ingest_usage_csv(csv_path);
  auto table = pollination_uplift(compute_revenue_table(rows, params));
  auto dominance = uplift_dominance_check(table);
  auto chart = depth_chart_data(table);

  write_file(out_dir, "revenue_table.csv", revenue_table_csv(table));
  write_file(out_dir, "revenue_report.json", to_json_string(table, params, dominance, chart));
  return kExitOk;
}

int cmd_sensitivity(const CommonArgs& args, const std::string& platform,
                    std::optional<double> step) {
  ScenarioConfig config = load_checked(args);
  fs::path out_dir = resolve_out_dir(args.out_dir);
  PlatformWeights weights = start_weights(config);

  SensitivityResult analytic =
      marginal_sensitivity(config.landscape, weights, platform, AlphaSum::exact());

  double dwell = 0.0;
  for (const auto& p : config.landscape.platforms) {
    if (p.id == platform) dwell = p.dwell_seconds;
  }
  FdSpec fd;
  fd.step_seconds = step ? *step : std::min(1.0, dwell / 2.0);
  fd.start = config.start;
  fd.depth_cutoff = config.run.depth_cutoff;
  fd.start_platform_weights = weights;
  fd.alpha_sum = AlphaSum::exact();

  fd.evaluator = Evaluator::Collapsed;
  SensitivityResult fd_collapsed = finite_difference_sensitivity(config.landscape, platform, fd);
  fd.evaluator = Evaluator::Recursive;
  SensitivityResult fd_recursive = finite_difference_sensitivity(config.landscape, platform, fd);

  write_file(out_dir, "sensitivity.json", to_json_string(analytic, fd_collapsed, fd_recursive));
  return kExitOk;
}

int cmd_hetero(const CommonArgs& args) {
  ScenarioConfig config = load_checked(args);
  fs::path out_dir = resolve_out_dir(args.out_dir);
  if (!config.heterogeneity) {
    throw Error(ErrorCode::ConfigError, "scenario has no 'heterogeneity' section");
  }
  const HeterogeneitySpec& spec = *config.heterogeneity;

  MedianLengthResult median = median_media_length(spec.profiles, spec.search_interval,
                                                  spec.grid_resolution);
  write_file(out_dir, "median_length.json", to_json_string(median));

  std::vector<TrajectoryPoint> trajectory;
  if (spec.profiles.size() >= 2) {
    trajectory = convergence_sim(spec.profiles[0], spec.profiles[1], spec.pool_lengths,
                                 spec.learning_rate, spec.steps);
  }
  write_file(out_dir, "hetero_trajectory.csv", trajectory_csv(trajectory));
  return kExitOk;
}

int cmd_pool_compare(const CommonArgs& args) {
  ScenarioConfig config = load_checked(args);
  fs::path out_dir = resolve_out_dir(args.out_dir);
  PoolComparison comparison = run_pool_comparison(config.landscape, config.start,
                                                  config.run.trips, config.run.master_seed,
                                                  mc_options(config));
  write_file(out_dir, "pool_comparison.json", to_json_string(comparison));
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
  auto* config = cmd->add_option("--config", args.config_path, "scenario JSON file");
  if (config_required) config->required();
  cmd->add_option("--out", args.out_dir,
                  "output directory (default $POLLINATOR_OUT_DIR or ./out)");
  cmd->add_option("--seed", args.seed, "override run.master_seed");
  cmd->add_option("--trips", args.trips, "override run.trips");
  cmd->add_option("--cutoff", args.cutoff, "override run.depth_cutoff");
  cmd->add_option("--workers", args.workers, "override run.workers (0 = auto)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-platform social-media traffic simulator and analytics"};
  app.require_subcommand(1);

  CommonArgs args;
  bool trace = false;
  int sweep = -1;
  std::string csv_path;
  std::string platform;
  std::optional<double> cpc, cpm, step;

  auto* simulate = app.add_subcommand("simulate", "run the Monte Carlo trip engine");
  add_common(simulate, args);
  simulate->add_flag("--trace", trace, "also write trips.jsonl (forces serial sampling)");

  auto* expect = app.add_subcommand("expect", "closed-form expected trip time, both evaluators");
  add_common(expect, args);
  expect->add_option("--sweep", sweep, "also evaluate recursive cutoffs 0..N");

  auto* revenue = app.add_subcommand("revenue", "advertising revenue indices from a usage CSV");
  revenue->add_option("csv", csv_path, "usage CSV (platform,time_min_per_day,freq_visits_per_week)")
      ->required();
  add_common(revenue, args, /*config_required=*/false);
  revenue->add_option("--cpc", cpc, "cost per click (default 2.00)");
  revenue->add_option("--cpm", cpm, "cost per thousand impressions (default 7.00)");

  auto* sensitivity = app.add_subcommand("sensitivity", "marginal traffic sensitivity for a platform");
  add_common(sensitivity, args);
  sensitivity->add_option("--platform", platform, "platform id to differentiate")->required();
  sensitivity->add_option("--step", step, "finite-difference step in seconds");

  auto* hetero = app.add_subcommand("hetero", "two-type media-length model");
  add_common(hetero, args);

  auto* pool_compare = app.add_subcommand("pool-compare", "traffic with pools off vs on");
  add_common(pool_compare, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(simulate)) return cmd_simulate(args, trace);
    if (app.got_subcommand(expect)) return cmd_expect(args, sweep);
    if (app.got_subcommand(revenue)) return cmd_revenue(csv_path, args, cpc, cpm);
    if (app.got_subcommand(sensitivity)) return cmd_sensitivity(args, platform, step);
    if (app.got_subcommand(hetero)) return cmd_hetero(args);
    if (app.got_subcommand(pool_compare)) return cmd_pool_compare(args);
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
