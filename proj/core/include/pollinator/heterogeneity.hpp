#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pollinator {

/// One user type's media-length preference: a peak at preferred_length (mu)
/// with falloff width `width` (sigma), plus a label for reporting.
struct EngagementProfile {
  std::string type_label;
  double preferred_length = 0.0;  // mu, seconds, > 0
  double width = 0.0;             // sigma, seconds, > 0
};

/// Engagement of a profile with media of the given length:
/// exp(-(L - mu)^2 / (2 sigma^2)), peak 1 at L = mu, symmetric, in (0, 1].
double engagement(const EngagementProfile& profile, double length_seconds);

struct MedianLengthResult {
  double length = 0.0;            // L*, argmax of summed engagement
  double joint_engagement = 0.0;  // summed engagement at L*
  double grid_resolution = 0.0;
};

struct SearchInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Kernel signature for pluggable engagement shapes (length, mu, sigma).
using EngagementKernel = std::function<double(double, double, double)>;

EngagementKernel gaussian_kernel();
EngagementKernel triangular_kernel();  // max(0, 1 - |L - mu| / (3 sigma))

// Grid search for the media length maximizing the summed engagement of all
// profiles. Ties break toward the smallest length; the interval endpoints are
// always evaluated. The interval must cover every profile's preferred length.
MedianLengthResult median_media_length(const std::vector<EngagementProfile>& profiles,
                                       const SearchInterval& interval,
                                       double grid_resolution,
                                       const EngagementKernel& kernel = {});

// Exposure-bias update: mu <- mu + eta * (consumed_length - mu), width kept.
EngagementProfile exposure_update(const EngagementProfile& profile, double consumed_length,
                                  double learning_rate);

struct TrajectoryPoint {
  int step = 0;
  double mu_a = 0.0;
  double mu_b = 0.0;
  double gap = 0.0;  // |mu_a - mu_b|
};

// Both profiles consume every pool item per step (in list order), each via
// exposure_update. The trajectory includes step 0. The gap strictly contracts
// whenever the pool is non-empty and eta is in (0, 1); with a single item at
// the midpoint, gap_k = gap_0 * (1 - eta)^k exactly.
std::vector<TrajectoryPoint> convergence_sim(const EngagementProfile& profile_a,
                                             const EngagementProfile& profile_b,
                                             const std::vector<double>& shared_pool_lengths,
                                             double learning_rate, int steps);

}  // namespace pollinator
