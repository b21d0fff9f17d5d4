#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pollinator/landscape.hpp"
#include "pollinator/trip_engine.hpp"

namespace pollinator {

struct ExpectationResult {
  double value_seconds = 0.0;        // expected total trip time
  std::optional<int> cutoff_used;    // nullopt when the value is an exact sum
  double truncation_bound = 0.0;     // sound upper bound on the omitted mass x max dwell
};

/// How the collapsed evaluator sums the alpha series. Exact uses the geometric
/// closed form a/(1-a) (or the full list for explicit schedules); Truncated
/// sums alpha_1..alpha_cutoff.
struct AlphaSum {
  enum class Mode { Truncated, Exact };
  Mode mode = Mode::Exact;
  int stage_cutoff = 0;

  static AlphaSum truncated(int stage_cutoff) { return {Mode::Truncated, stage_cutoff}; }
  static AlphaSum exact() { return {Mode::Exact, 0}; }
};

/// Landing-probability masses per platform id; normalized internally so that
/// p_n = weight_n / sum. Platforms missing from the list get p_n = 0.
using PlatformWeights = std::vector<std::pair<std::string, double>>;

// Expected total trip time under the operational trip semantics, truncated at
// depth_cutoff extensions (cutoff 0 permits exactly one stage). Equals the
// exact expectation of sample_trip's total_seconds at the same cutoff.
ExpectationResult expected_time_recursive(const Landscape& landscape, const TripStart& start,
                                          int depth_cutoff);

// The collapsed closed form, evaluated verbatim:
//   sum_n sum_m p_mn * p_n * T_n  +  (sum_x alpha_x) * sum_n sum_m p_mn^2 * T_n
// Hop probabilities p_mn are context-free here (no personality is excluded):
// p_mn = w_mn / (w0 + total weight on n). Linear in every T_n.
ExpectationResult expected_time_collapsed(const Landscape& landscape,
                                          const PlatformWeights& start_platform_weights,
                                          const AlphaSum& alpha_sum);

struct PathStep {
  std::string personality;
  std::string platform;
  bool via_pool = false;
  std::optional<std::string> hop_target;
};

struct PathEntry {
  std::vector<PathStep> steps;
  TerminalReason terminal_reason = TerminalReason::ReturnedAndQuit;
  double probability = 0.0;
  double total_seconds = 0.0;
};

struct EnumerationResult {
  ExpectationResult expectation;
  std::vector<PathEntry> paths;
  double total_probability = 0.0;  // 1 up to rounding
};

struct EnumerationOptions {
  std::uint64_t max_paths = 10'000'000;  // guard; exceeding it throws InstanceTooLarge
  bool collect_paths = true;             // expectation and mass are always computed
};

// Brute-force oracle: walks every positive-probability trip up to the cutoff
// under the exact trip-engine semantics (pool branch, landing, hop-vs-return,
// continuation) and accumulates probability-weighted times.
EnumerationResult enumerate_trips(const Landscape& landscape, const TripStart& start,
                                  int depth_cutoff, const EnumerationOptions& options = {});

enum class Evaluator { Recursive, Collapsed };

struct SensitivityResult {
  std::string platform;
  double derivative = 0.0;  // d(expected time)/d(T_i), unitless
  std::string method;       // "analytic" | "finite-difference"
  bool positivity_precondition = false;  // p_i > 0 and some p_mi > 0
  std::string note;                      // set when the precondition fails
};

// Analytic derivative of the collapsed form with respect to T_i:
//   p_i * sum_m p_mi  +  (sum_x alpha_x) * sum_m p_mi^2
// Strictly positive whenever p_i > 0 and some p_mi > 0; exactly zero (with a
// diagnostic note) when every p_mi = 0.
SensitivityResult marginal_sensitivity(const Landscape& landscape,
                                       const PlatformWeights& start_platform_weights,
                                       const std::string& platform_i,
                                       const AlphaSum& alpha_sum);

/// Inputs for the central-difference check; only the fields the chosen
/// evaluator needs are read.
struct FdSpec {
  Evaluator evaluator = Evaluator::Collapsed;
  double step_seconds = 0.0;  // h > 0, h < T_i
  TripStart start;                       // recursive
  int depth_cutoff = 64;                 // recursive
  PlatformWeights start_platform_weights;  // collapsed
  AlphaSum alpha_sum = AlphaSum::exact();  // collapsed
};

// (E(T_i + h) - E(T_i - h)) / 2h with everything else fixed.
SensitivityResult finite_difference_sensitivity(const Landscape& landscape,
                                                const std::string& platform_i,
                                                const FdSpec& spec);

}  // namespace pollinator
