#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pollinator {

/// A personality's curated cross-platform link pool. When a user opens the
/// pool instead of a direct link (probability `pick_probability`), the landing
/// platform is drawn from the same distribution as a direct landing, but the
/// dwell on arrival is scaled by `dwell_multiplier`.
struct PoolConfig {
  bool enabled = false;
  double pick_probability = 0.0;  // rho, in [0, 1]
  double dwell_multiplier = 1.0;  // lambda, >= 1
};

/// One social-media platform: a relative traffic mass (used for landing
/// probabilities) and the average dwell per landing in seconds.
struct OsmPlatform {
  std::string id;
  std::string name;
  double traffic_weight = 0.0;  // >= 0
  double dwell_seconds = 0.0;   // T_n, > 0
};

/// A public figure with pages on several platforms. `attraction` maps a
/// platform id to the personality's hop weight there; platforms present but
/// missing from the map carry weight 0 (the personality cannot be hopped to).
struct Personality {
  std::string id;
  std::string name;
  std::vector<std::string> presence;         // platform ids, unique, non-empty
  std::map<std::string, double> attraction;  // platform id -> weight, keys in presence
  std::optional<PoolConfig> pool;
};

/// Per-stage trip-extension probabilities alpha_x, x = 1, 2, ...
/// Geometric: alpha_x = base^x. Explicit: listed values, 0 past the end.
/// Valid schedules are strictly decreasing while nonzero, all in [0, 1).
struct ContinuationSchedule {
  enum class Kind { Geometric, Explicit };

  Kind kind = Kind::Geometric;
  double base = 0.0;           // geometric only, in [0, 1)
  std::vector<double> values;  // explicit only

  static ContinuationSchedule geometric(double base) {
    ContinuationSchedule s;
    s.kind = Kind::Geometric;
    s.base = base;
    return s;
  }
  static ContinuationSchedule explicit_values(std::vector<double> values) {
    ContinuationSchedule s;
    s.kind = Kind::Explicit;
    s.values = std::move(values);
    return s;
  }
};

/// alpha_x for stage extension x >= 1. Result is in [0, 1).
double continuation_probability(const ContinuationSchedule& schedule, int stage_x);

/// The whole field: platforms, personalities, the return-to-pollinator weight
/// w0 (> 0 so every hop decision terminates with positive probability), and
/// the continuation schedule.
struct Landscape {
  std::vector<OsmPlatform> platforms;
  std::vector<Personality> personalities;
  double return_weight = 1.0;  // w0
  ContinuationSchedule schedule;
};

/// One validation finding. `code` is stable and machine-readable.
struct Diagnostic {
  std::string code;
  std::string subject;  // offending id, or "" for landscape-level findings
  std::string message;
};

/// Checks every landscape invariant. Empty result iff the landscape is valid.
/// Never throws; diagnostics are the output.
std::vector<Diagnostic> validate_landscape(const Landscape& landscape);

struct PlatformProbability {
  std::string platform;
  double probability = 0.0;
};

/// Landing probabilities over a personality's presence minus the origin,
/// proportional to platform traffic weight. Entries follow the landscape's
/// platform order; zero-weight alternatives appear with probability 0.
struct LandingDistribution {
  std::vector<PlatformProbability> choices;

  double probability_of(const std::string& platform) const;
};

struct HopProbability {
  std::string personality;
  double probability = 0.0;
};

/// Within-platform hop probabilities w_m / (w0 + sum of weights on the
/// platform excluding the current personality), plus the implicit
/// return-to-pollinator probability p0 = w0 / (same denominator).
struct HopDistribution {
  std::vector<HopProbability> choices;  // landscape personality order
  double return_probability = 1.0;      // p0, always > 0 when w0 > 0

  double probability_of(const std::string& personality) const;
};

LandingDistribution landing_distribution(const Landscape& landscape,
                                         const std::string& personality,
                                         const std::string& origin_platform);

HopDistribution hop_distribution(const Landscape& landscape,
                                 const std::string& platform,
                                 const std::string& exclude_personality);

}  // namespace pollinator
