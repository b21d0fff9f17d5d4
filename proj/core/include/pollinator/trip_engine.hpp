#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pollinator/landscape.hpp"

namespace pollinator {

enum class TerminalReason {
  ReturnedAndQuit,     // hop decision picked the pollinator, or no alternative remained
  ContinuationFailed,  // hopped, but the alpha_x extension draw failed
  DepthCutoff,         // hopped at the last permitted stage
};

const char* terminal_reason_name(TerminalReason reason);

struct StageRecord {
  int stage_index = 0;  // x, 1-based
  std::string personality;
  std::string platform;
  double dwell_seconds = 0.0;  // platform dwell * (pool multiplier when via_pool)
  bool via_pool = false;
  std::optional<std::string> hop_target;  // within-platform hop taken after landing
};

struct TripRecord {
  std::uint64_t seed = 0;
  std::vector<StageRecord> stages;
  TerminalReason terminal_reason = TerminalReason::ReturnedAndQuit;

  double total_seconds() const;
};

struct PlatformTraffic {
  std::string platform;
  std::uint64_t landings = 0;
  double total_seconds = 0.0;
  double share_of_landings = 0.0;
};

struct TrafficReport {
  std::uint64_t trips = 0;
  double mean_trip_seconds = 0.0;
  double standard_error = 0.0;                // sample stddev / sqrt(trips)
  std::vector<PlatformTraffic> platforms;     // landscape platform order
};

struct TripStart {
  std::string personality;
  std::string platform;
};

struct McOptions {
  int depth_cutoff = 64;
  int workers = 0;  // 0 = hardware concurrency
  // When set, every sampled TripRecord is passed here in trip-index order and
  // sampling runs serially. Reports are unaffected (seeds are per-trip).
  std::function<void(const TripRecord&)> trace;
};

// Samples one trip. Draw order per stage x, fixed and relied on by the replay
// tests:
//   1. pool-vs-direct draw        (consumed iff the personality's pool is enabled)
//   2. landing draw               (cumulative walk over landing_distribution in
//                                  landscape platform order; if rounding leaves
//                                  the uniform past the final bound, the last
//                                  positive-probability choice is taken)
//   3. dwell accrual              (no draw)
//   4. hop-vs-return draw         (consumed iff some positive-weight hop
//                                  candidate exists; a uniform past the total
//                                  hop mass means return)
//   5. continuation draw, alpha_x (consumed iff a hop was taken and x <=
//                                  depth_cutoff, even when alpha_x = 0; at
//                                  x = depth_cutoff + 1 the trip ends with
//                                  DepthCutoff without a draw)
// A stage whose landing choice set is empty ends the trip with ReturnedAndQuit
// (no stage record); if that happens at stage 1 the start pair is invalid and
// NoAlternativePlatform is thrown instead.
TripRecord sample_trip(const Landscape& landscape, const TripStart& start,
                       std::uint64_t seed, int depth_cutoff = 64);

// Runs n_trips independent trips; trip i is seeded with trip_seed(master_seed, i).
// Aggregation is a block-ordered reduction (fixed block size), so the report is
// bit-identical for any worker count.
TrafficReport run_monte_carlo(const Landscape& landscape, const TripStart& start,
                              std::uint64_t n_trips, std::uint64_t master_seed,
                              const McOptions& options = {});

struct PoolComparison {
  TrafficReport disabled;  // every pool switched off
  TrafficReport enabled;   // landscape as configured
};

// Compares traffic with pools off vs on, using independent seed streams
// derived from master_seed. Requires at least one enabled pool.
PoolComparison run_pool_comparison(const Landscape& landscape, const TripStart& start,
                                   std::uint64_t n_trips, std::uint64_t master_seed,
                                   const McOptions& options = {});

}  // namespace pollinator
