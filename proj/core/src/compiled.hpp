#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pollinator/errors.hpp"
#include "pollinator/landscape.hpp"

namespace pollinator::detail {

struct LandingChoice {
  int platform = -1;
  double probability = 0.0;
};

struct HopChoice {
  int personality = -1;
  double probability = 0.0;
};

/// Index-based, validated view of a Landscape. Every probability the sampler,
/// the enumerator, and the closed-form evaluators use is produced here, so all
/// three see bit-identical numbers.
class CompiledLandscape {
 public:
  /// Validates the landscape and throws Error(ConfigError) listing the first
  /// diagnostic if it is malformed.
  explicit CompiledLandscape(const Landscape& landscape);

  const Landscape& source() const { return *source_; }
  int num_platforms() const { return static_cast<int>(source_->platforms.size()); }
  int num_personalities() const { return static_cast<int>(source_->personalities.size()); }

  int platform_index(std::string_view id) const;     // -1 when unknown
  int personality_index(std::string_view id) const;  // -1 when unknown

  const OsmPlatform& platform(int idx) const { return source_->platforms[idx]; }
  const Personality& personality(int idx) const { return source_->personalities[idx]; }

  /// Position of platform s in personality m's presence, -1 when absent.
  int presence_position(int m, int s) const;

  /// Landing choices for personality m with origin at presence position pos.
  /// Probabilities are traffic_weight / total over the other presence
  /// platforms, listed in landscape platform order. Empty when the total
  /// alternative weight is zero (no landing possible).
  const std::vector<LandingChoice>& landing_choices(int m, int pos) const;

  struct Resident {
    int personality = -1;
    double weight = 0.0;
  };
  /// Personalities present on platform n, landscape order, with hop weights.
  const std::vector<Resident>& residents(int n) const { return residents_[n]; }

  /// Hop distribution on platform n excluding personality `exclude`
  /// (pass -1 to exclude nobody). p_m = w_m / (w0 + sum of included weights).
  void hop_into(int n, int exclude, std::vector<HopChoice>& out, double& p0) const;

  double return_weight() const { return source_->return_weight; }
  double alpha(int stage_x) const { return continuation_probability(source_->schedule, stage_x); }

  bool pool_enabled(int m) const { return pool_enabled_[m]; }
  double pool_pick_probability(int m) const { return pool_pick_[m]; }
  double pool_dwell_multiplier(int m) const { return pool_mult_[m]; }
  /// Expected dwell scale for landings routed by personality m:
  /// 1 - rho + rho * lambda (1 when no enabled pool).
  double expected_dwell_factor(int m) const { return pool_factor_[m]; }

  /// sup over (platform, personality) of dwell * pool multiplier; used for
  /// sound truncation bounds.
  double max_effective_dwell() const { return max_effective_dwell_; }

 private:
  const Landscape* source_;
  std::unordered_map<std::string, int> platform_by_id_;
  std::unordered_map<std::string, int> personality_by_id_;
  std::vector<std::vector<int>> presence_;                         // per personality, platform indices
  std::vector<std::vector<std::vector<LandingChoice>>> landings_;  // [m][presence pos]
  std::vector<std::vector<Resident>> residents_;                   // per platform
  std::vector<bool> pool_enabled_;
  std::vector<double> pool_pick_;
  std::vector<double> pool_mult_;
  std::vector<double> pool_factor_;
  double max_effective_dwell_ = 0.0;
};

}  // namespace pollinator::detail
