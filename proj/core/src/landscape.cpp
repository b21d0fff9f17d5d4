#include "pollinator/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "compiled.hpp"
#include "pollinator/errors.hpp"

namespace pollinator {

double continuation_probability(const ContinuationSchedule& schedule, int stage_x) {
  if (stage_x < 1) {
    throw Error(ErrorCode::ConfigError, "continuation stage must be >= 1");
  }
  if (schedule.kind == ContinuationSchedule::Kind::Geometric) {
    if (schedule.base == 0.0) return 0.0;
    double result = 1.0;
    for (int i = 0; i < stage_x; ++i) {
      result *= schedule.base;
      if (result == 0.0) break;
    }
    return result;
  }
  if (stage_x > static_cast<int>(schedule.values.size())) return 0.0;
  return schedule.values[static_cast<size_t>(stage_x) - 1];
}

double LandingDistribution::probability_of(const std::string& platform) const {
  for (const auto& c : choices) {
    if (c.platform == platform) return c.probability;
  }
  return 0.0;
}

double HopDistribution::probability_of(const std::string& personality) const {
  for (const auto& c : choices) {
    if (c.personality == personality) return c.probability;
  }
  return 0.0;
}

namespace {

void check_schedule(const ContinuationSchedule& schedule, std::vector<Diagnostic>& out) {
  if (schedule.kind == ContinuationSchedule::Kind::Geometric) {
    if (!(schedule.base >= 0.0 && schedule.base < 1.0) || !std::isfinite(schedule.base)) {
      out.push_back({"ScheduleBaseOutOfRange", "",
                     "geometric schedule base must lie in [0, 1)"});
    }
    return;
  }
  bool range_ok = true;
  for (double v : schedule.values) {
    if (!(v >= 0.0 && v < 1.0) || !std::isfinite(v)) {
      out.push_back({"ScheduleValueOutOfRange", "",
                     "explicit schedule values must lie in [0, 1)"});
      range_ok = false;
      break;
    }
  }
  if (!range_ok) return;
  // Strictly decreasing while nonzero; once zero, zero forever.
  for (size_t i = 1; i < schedule.values.size(); ++i) {
    double prev = schedule.values[i - 1];
    double cur = schedule.values[i];
    bool ok = (cur == 0.0) ? true : cur < prev;
    if (!ok) {
      out.push_back({"NonDecreasingSchedule", "",
                     "explicit schedule must be strictly decreasing while nonzero"});
      return;
    }
  }
}

}  // namespace

std::vector<Diagnostic> validate_landscape(const Landscape& landscape) {
  std::vector<Diagnostic> out;

  if (landscape.platforms.size() < 2) {
    out.push_back({"TooFewPlatforms", "", "a landscape needs at least 2 platforms"});
  }

  std::unordered_set<std::string> platform_ids;
  bool any_positive_traffic = false;
  for (const auto& p : landscape.platforms) {
    if (!platform_ids.insert(p.id).second) {
      out.push_back({"DuplicatePlatformId", p.id, "platform id appears more than once"});
    }
    if (!(p.traffic_weight >= 0.0) || !std::isfinite(p.traffic_weight)) {
      out.push_back({"NegativeTrafficWeight", p.id, "traffic_weight must be >= 0"});
    } else if (p.traffic_weight > 0.0) {
      any_positive_traffic = true;
    }
    if (!(p.dwell_seconds > 0.0) || !std::isfinite(p.dwell_seconds)) {
      out.push_back({"NonPositiveDwellTime", p.id, "dwell_seconds must be > 0"});
    }
  }
  if (!landscape.platforms.empty() && !any_positive_traffic) {
    out.push_back({"NoPositiveTrafficWeight", "",
                   "at least one platform needs traffic_weight > 0"});
  }

  std::unordered_set<std::string> personality_ids;
  for (const auto& m : landscape.personalities) {
    if (!personality_ids.insert(m.id).second) {
      out.push_back({"DuplicatePersonalityId", m.id, "personality id appears more than once"});
    }
    if (m.presence.empty()) {
      out.push_back({"EmptyPresence", m.id, "presence must list at least one platform"});
    }
    std::set<std::string> presence_set;
    for (const auto& pid : m.presence) {
      presence_set.insert(pid);
      if (!platform_ids.count(pid)) {
        out.push_back({"UnknownPresencePlatform", m.id,
                       "presence references unknown platform '" + pid + "'"});
      }
    }
    for (const auto& [pid, w] : m.attraction) {
      if (!presence_set.count(pid)) {
        out.push_back({"AttractionOutsidePresence", m.id,
                       "attraction key '" + pid + "' is not in presence"});
      }
      if (!(w >= 0.0) || !std::isfinite(w)) {
        out.push_back({"NegativeAttractionWeight", m.id,
                       "attraction weight for '" + pid + "' must be >= 0"});
      }
    }
    if (m.pool) {
      if (!(m.pool->pick_probability >= 0.0 && m.pool->pick_probability <= 1.0) ||
          !std::isfinite(m.pool->pick_probability)) {
        out.push_back({"InvalidPickProbability", m.id, "pool pick_probability must lie in [0, 1]"});
      }
      if (!(m.pool->dwell_multiplier >= 1.0) || !std::isfinite(m.pool->dwell_multiplier)) {
        out.push_back({"InvalidDwellMultiplier", m.id, "pool dwell_multiplier must be >= 1"});
      }
    }
  }

  if (!(landscape.return_weight > 0.0) || !std::isfinite(landscape.return_weight)) {
    out.push_back({"ZeroReturnWeight", "", "return_weight w0 must be > 0"});
  }

  check_schedule(landscape.schedule, out);
  return out;
}

LandingDistribution landing_distribution(const Landscape& landscape,
                                         const std::string& personality,
                                         const std::string& origin_platform) {
  detail::CompiledLandscape cl(landscape);
  int m = cl.personality_index(personality);
  if (m < 0) throw Error(ErrorCode::UnknownPersonality, "unknown personality '" + personality + "'");
  int s = cl.platform_index(origin_platform);
  if (s < 0) throw Error(ErrorCode::UnknownPlatform, "unknown platform '" + origin_platform + "'");
  int pos = cl.presence_position(m, s);
  if (pos < 0) {
    throw Error(ErrorCode::PersonalityNotPresent,
                "personality '" + personality + "' is not present on '" + origin_platform + "'");
  }
  const auto& choices = cl.landing_choices(m, pos);
  if (choices.empty()) {
    throw Error(ErrorCode::NoAlternativePlatform,
                "personality '" + personality + "' has no alternative platform with traffic");
  }
  LandingDistribution dist;
  dist.choices.reserve(choices.size());
  for (const auto& c : choices) {
    dist.choices.push_back({cl.platform(c.platform).id, c.probability});
  }
  return dist;
}

HopDistribution hop_distribution(const Landscape& landscape,
                                 const std::string& platform,
                                 const std::string& exclude_personality) {
  detail::CompiledLandscape cl(landscape);
  int n = cl.platform_index(platform);
  if (n < 0) throw Error(ErrorCode::UnknownPlatform, "unknown platform '" + platform + "'");
  int excluded = cl.personality_index(exclude_personality);

  std::vector<detail::HopChoice> choices;
  double p0 = 1.0;
  cl.hop_into(n, excluded, choices, p0);

  HopDistribution dist;
  dist.return_probability = p0;
  dist.choices.reserve(choices.size());
  for (const auto& c : choices) {
    dist.choices.push_back({cl.personality(c.personality).id, c.probability});
  }
  return dist;
}

namespace detail {

CompiledLandscape::CompiledLandscape(const Landscape& landscape) : source_(&landscape) {
  auto diagnostics = validate_landscape(landscape);
  if (!diagnostics.empty()) {
    throw Error(ErrorCode::ConfigError,
                "invalid landscape: " + diagnostics.front().code +
                    (diagnostics.front().subject.empty() ? "" : " (" + diagnostics.front().subject + ")") +
                    ": " + diagnostics.front().message);
  }

  const int num_plat = num_platforms();
  const int num_pers = num_personalities();
  for (int n = 0; n < num_plat; ++n) platform_by_id_[landscape.platforms[n].id] = n;
  for (int m = 0; m < num_pers; ++m) personality_by_id_[landscape.personalities[m].id] = m;

  presence_.resize(num_pers);
  landings_.resize(num_pers);
  residents_.resize(num_plat);
  pool_enabled_.resize(num_pers, false);
  pool_pick_.resize(num_pers, 0.0);
  pool_mult_.resize(num_pers, 1.0);
  pool_factor_.resize(num_pers, 1.0);

  for (int m = 0; m < num_pers; ++m) {
    const Personality& pers = landscape.personalities[m];

    // Presence in landscape platform order, so every derived distribution
    // iterates platforms the same way.
    std::vector<int> pres;
    for (const auto& pid : pers.presence) pres.push_back(platform_by_id_.at(pid));
    std::sort(pres.begin(), pres.end());
    presence_[m] = pres;

    for (int s : pres) {
      double weight = 0.0;
      auto it = pers.attraction.find(landscape.platforms[s].id);
      if (it != pers.attraction.end()) weight = it->second;
      residents_[s].push_back({m, weight});
    }

    if (pers.pool && pers.pool->enabled) {
      pool_enabled_[m] = true;
      pool_pick_[m] = pers.pool->pick_probability;
      pool_mult_[m] = pers.pool->dwell_multiplier;
      pool_factor_[m] = 1.0 - pool_pick_[m] + pool_pick_[m] * pool_mult_[m];
    }

    // Landing distribution per origin position.
    landings_[m].resize(pres.size());
    for (size_t pos = 0; pos < pres.size(); ++pos) {
      double total = 0.0;
      for (int s : pres) {
        if (s == pres[pos]) continue;
        total += landscape.platforms[s].traffic_weight;
      }
      if (total <= 0.0) continue;  // empty -> no landing possible
      auto& choices = landings_[m][pos];
      for (int s : pres) {
        if (s == pres[pos]) continue;
        choices.push_back({s, landscape.platforms[s].traffic_weight / total});
      }
    }
  }

  double max_mult = 1.0;
  for (int m = 0; m < num_pers; ++m) max_mult = std::max(max_mult, pool_mult_[m]);
  for (const auto& p : landscape.platforms) {
    max_effective_dwell_ = std::max(max_effective_dwell_, p.dwell_seconds * max_mult);
  }
}

int CompiledLandscape::platform_index(std::string_view id) const {
  auto it = platform_by_id_.find(std::string(id));
  return it == platform_by_id_.end() ? -1 : it->second;
}

int CompiledLandscape::personality_index(std::string_view id) const {
  auto it = personality_by_id_.find(std::string(id));
  return it == personality_by_id_.end() ? -1 : it->second;
}

int CompiledLandscape::presence_position(int m, int s) const {
  const auto& pres = presence_[m];
  auto it = std::lower_bound(pres.begin(), pres.end(), s);
  if (it == pres.end() || *it != s) return -1;
  return static_cast<int>(it - pres.begin());
}

const std::vector<LandingChoice>& CompiledLandscape::landing_choices(int m, int pos) const {
  return landings_[m][pos];
}

void CompiledLandscape::hop_into(int n, int exclude, std::vector<HopChoice>& out, double& p0) const {
  out.clear();
  double denom = source_->return_weight;
  for (const auto& r : residents_[n]) {
    if (r.personality == exclude) continue;
    denom += r.weight;
  }
  for (const auto& r : residents_[n]) {
    if (r.personality == exclude) continue;
    out.push_back({r.personality, r.weight / denom});
  }
  p0 = source_->return_weight / denom;
}

}  // namespace detail

}  // namespace pollinator
