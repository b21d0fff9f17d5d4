#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pollinator/expectation.hpp"
#include "pollinator/heterogeneity.hpp"
#include "pollinator/landscape.hpp"
#include "pollinator/revenue.hpp"
#include "pollinator/trip_engine.hpp"

namespace pollinator {

/// Version stamped into every config and report this project reads or writes.
inline constexpr int kSchemaVersion = 1;

struct RunParams {
  std::uint64_t trips = 100000;
  std::uint64_t master_seed = 1;
  int depth_cutoff = 64;
  int workers = 0;
};

struct HeterogeneitySpec {
  std::vector<EngagementProfile> profiles;
  std::vector<double> pool_lengths;
  double learning_rate = 0.5;
  int steps = 10;
  SearchInterval search_interval{1.0, 60.0};
  double grid_resolution = 0.01;
};

/// A scenario file: the landscape plus everything the CLI commands need.
/// JSON schema (see README for the full field list):
///   {
///     "schema_version": 1,
///     "landscape": {
///       "return_weight": w0,
///       "schedule": {"kind": "geometric", "base": a}
///                 | {"kind": "explicit", "values": [...]},
///       "platforms": [{"id", "name"?, "traffic_weight", "dwell_seconds"}],
///       "personalities": [{"id", "name"?, "presence": [...],
///                          "attraction": {platform: weight},
///                          "pool"?: {"enabled", "pick_probability",
///                                    "dwell_multiplier"}}]
///     },
///     "start": {"personality", "platform"},
///     "run"?: {"trips", "master_seed", "depth_cutoff", "workers"},
///     "revenue"?: {"cpc", "cpm"},
///     "heterogeneity"?: {"profiles": [{"type_label", "preferred_length",
///                                      "width"}],
///                        "pool_lengths": [...], "learning_rate", "steps",
///                        "search": {"lo", "hi", "resolution"}}
///   }
struct ScenarioConfig {
  Landscape landscape;
  TripStart start;
  RunParams run;
  RevenueParams revenue;
  std::optional<HeterogeneitySpec> heterogeneity;
};

/// Parses and structurally validates a scenario; landscape invariants are NOT
/// checked here (call validate_landscape for diagnostics).
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);

// --- deterministic serialization -----------------------------------------
// All emitters produce byte-stable output for identical inputs: fixed key
// order, fixed float formatting, trailing newline.

std::string to_json_string(const TrafficReport& report);

/// One JSON-lines trace record for a sampled trip (no trailing newline).
std::string to_json_line(const TripRecord& record);
/// Header line that starts a trip-trace JSONL file.
std::string trace_header_line();

struct ExpectationReport {
  ExpectationResult recursive;
  ExpectationResult collapsed;
  double divergence = 0.0;  // |collapsed - recursive|
  std::vector<ExpectationResult> cutoff_sweep;  // optional, recursive per cutoff
};
std::string to_json_string(const ExpectationReport& report);

std::string to_json_string(const SensitivityResult& analytic,
                           const SensitivityResult& fd_collapsed,
                           const SensitivityResult& fd_recursive);

/// Table CSV mirroring the revenue-index column order; currency columns carry
/// three decimals.
std::string revenue_table_csv(const std::vector<RevenueRow>& table);
std::string to_json_string(const std::vector<RevenueRow>& table, const RevenueParams& params,
                           const DominanceReport& dominance,
                           const std::vector<DepthPoint>& depth_chart);

/// CSV `step,mu_a,mu_b,gap` with a schema comment line.
std::string trajectory_csv(const std::vector<TrajectoryPoint>& trajectory);
std::string to_json_string(const MedianLengthResult& result);

std::string to_json_string(const PoolComparison& comparison);

}  // namespace pollinator
