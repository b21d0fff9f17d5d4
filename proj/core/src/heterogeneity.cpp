#include "pollinator/heterogeneity.hpp"

#include <cmath>

#include "pollinator/errors.hpp"

namespace pollinator {

namespace {

double gaussian(double length, double mu, double sigma) {
  double d = (length - mu) / sigma;
  return std::exp(-0.5 * d * d);
}

void check_profile(const EngagementProfile& profile) {
  if (!(profile.preferred_length > 0.0) || !std::isfinite(profile.preferred_length)) {
    throw Error(ErrorCode::NonPositiveLength,
                "profile '" + profile.type_label + "' needs preferred_length > 0");
  }
  if (!(profile.width > 0.0) || !std::isfinite(profile.width)) {
    throw Error(ErrorCode::NonPositiveLength,
                "profile '" + profile.type_label + "' needs width > 0");
  }
}

}  // namespace

EngagementKernel gaussian_kernel() {
  return [](double length, double mu, double sigma) { return gaussian(length, mu, sigma); };
}

EngagementKernel triangular_kernel() {
  return [](double length, double mu, double sigma) {
    return std::max(0.0, 1.0 - std::abs(length - mu) / (3.0 * sigma));
  };
}

double engagement(const EngagementProfile& profile, double length_seconds) {
  check_profile(profile);
  if (!(length_seconds > 0.0) || !std::isfinite(length_seconds)) {
    throw Error(ErrorCode::NonPositiveLength, "media length must be > 0");
  }
  return gaussian(length_seconds, profile.preferred_length, profile.width);
}

MedianLengthResult median_media_length(const std::vector<EngagementProfile>& profiles,
                                       const SearchInterval& interval,
                                       double grid_resolution,
                                       const EngagementKernel& kernel) {
  if (profiles.empty()) {
    throw Error(ErrorCode::EmptyProfiles, "need at least one engagement profile");
  }
  for (const auto& p : profiles) check_profile(p);
  if (!(interval.lo > 0.0) || !(interval.hi > interval.lo)) {
    throw Error(ErrorCode::DegenerateInterval,
                "search interval must satisfy 0 < lo < hi");
  }
  if (!(grid_resolution > 0.0) || !std::isfinite(grid_resolution)) {
    throw Error(ErrorCode::DegenerateInterval, "grid resolution must be > 0");
  }
  for (const auto& p : profiles) {
    if (p.preferred_length < interval.lo || p.preferred_length > interval.hi) {
      throw Error(ErrorCode::DegenerateInterval,
                  "search interval does not cover preferred_length of '" + p.type_label + "'");
    }
  }

  const EngagementKernel& k = kernel ? kernel : gaussian_kernel();
  auto joint = [&](double length) {
    double total = 0.0;
    for (const auto& p : profiles) total += k(length, p.preferred_length, p.width);
    return total;
  };

  MedianLengthResult best;
  best.grid_resolution = grid_resolution;
  best.length = interval.lo;
  best.joint_engagement = joint(interval.lo);

  // Ascending grid; strictly-greater replacement breaks ties toward smaller L.
  const auto count = static_cast<long long>((interval.hi - interval.lo) / grid_resolution);
  for (long long i = 1; i <= count; ++i) {
    double length = interval.lo + static_cast<double>(i) * grid_resolution;
    if (length > interval.hi) break;
    double value = joint(length);
    if (value > best.joint_engagement) {
      best.joint_engagement = value;
      best.length = length;
    }
  }
  double tail = joint(interval.hi);
  if (tail > best.joint_engagement) {
    best.joint_engagement = tail;
    best.length = interval.hi;
  }
  return best;
}

EngagementProfile exposure_update(const EngagementProfile& profile, double consumed_length,
                                  double learning_rate) {
  check_profile(profile);
  if (!(consumed_length > 0.0) || !std::isfinite(consumed_length)) {
    throw Error(ErrorCode::NonPositiveLength, "consumed media length must be > 0");
  }
  if (!(learning_rate >= 0.0 && learning_rate <= 1.0)) {
    throw Error(ErrorCode::InvalidLearningRate, "learning rate must lie in [0, 1]");
  }
  EngagementProfile updated = profile;
  updated.preferred_length += learning_rate * (consumed_length - profile.preferred_length);
  return updated;
}

std::vector<TrajectoryPoint> convergence_sim(const EngagementProfile& profile_a,
                                             const EngagementProfile& profile_b,
                                             const std::vector<double>& shared_pool_lengths,
                                             double learning_rate, int steps) {
  check_profile(profile_a);
  check_profile(profile_b);
  if (!(learning_rate > 0.0 && learning_rate < 1.0)) {
    throw Error(ErrorCode::InvalidLearningRate, "learning rate must lie in (0, 1)");
  }
  if (steps < 0) {
    throw Error(ErrorCode::ConfigError, "steps must be >= 0");
  }

  EngagementProfile a = profile_a;
  EngagementProfile b = profile_b;
  std::vector<TrajectoryPoint> trajectory;
  trajectory.reserve(static_cast<size_t>(steps) + 1);
  trajectory.push_back({0, a.preferred_length, b.preferred_length,
                        std::abs(a.preferred_length - b.preferred_length)});
  for (int step = 1; step <= steps; ++step) {
    for (double length : shared_pool_lengths) {
      a = exposure_update(a, length, learning_rate);
      b = exposure_update(b, length, learning_rate);
    }
    trajectory.push_back({step, a.preferred_length, b.preferred_length,
                          std::abs(a.preferred_length - b.preferred_length)});
  }
  return trajectory;
}

}  // namespace pollinator
