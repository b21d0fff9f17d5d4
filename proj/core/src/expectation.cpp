#include "pollinator/expectation.hpp"

#include <algorithm>
#include <cmath>

#include "compiled.hpp"
#include "pollinator/errors.hpp"

namespace pollinator {

namespace {

// sum_{j > cutoff} prod_{x=1}^{j} alpha_x: an upper bound on the probability
// mass of trips extending past stage cutoff + 1, summed over all later stages.
double alpha_tail_mass(const detail::CompiledLandscape& cl, int cutoff) {
  double prod = 1.0;
  for (int x = 1; x <= cutoff; ++x) {
    prod *= cl.alpha(x);
    if (prod == 0.0) return 0.0;
  }
  double tail = 0.0;
  for (int j = cutoff + 1;; ++j) {
    prod *= cl.alpha(j);
    if (prod <= 0.0) break;
    tail += prod;
    if (prod < 1e-30) break;
  }
  return tail;
}

void resolve_start_pair(const detail::CompiledLandscape& cl, const TripStart& start,
                        int& m, int& s, int& pos) {
  m = cl.personality_index(start.personality);
  if (m < 0) {
    throw Error(ErrorCode::UnknownPersonality,
                "unknown personality '" + start.personality + "'");
  }
  s = cl.platform_index(start.platform);
  if (s < 0) {
    throw Error(ErrorCode::UnknownPlatform, "unknown platform '" + start.platform + "'");
  }
  pos = cl.presence_position(m, s);
  if (pos < 0) {
    throw Error(ErrorCode::PersonalityNotPresent,
                "personality '" + start.personality + "' is not present on '" +
                    start.platform + "'");
  }
  if (cl.landing_choices(m, pos).empty()) {
    throw Error(ErrorCode::NoAlternativePlatform,
                "personality '" + start.personality +
                    "' has no alternative platform with traffic");
  }
}

// Normalized p_n vector (landscape platform order) from user weights.
std::vector<double> normalize_weights(const detail::CompiledLandscape& cl,
                                      const PlatformWeights& weights) {
  std::vector<double> p(cl.num_platforms(), 0.0);
  double total = 0.0;
  for (const auto& [id, w] : weights) {
    int n = cl.platform_index(id);
    if (n < 0) throw Error(ErrorCode::UnknownPlatform, "unknown platform '" + id + "'");
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::ConfigError, "platform weight for '" + id + "' must be >= 0");
    }
    p[n] += w;
    total += w;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::ConfigError, "start platform weights must have positive total");
  }
  for (auto& v : p) v /= total;
  return p;
}

// sum over x of alpha_x per the AlphaSum mode, plus the exact remainder
// (exact_sum - used_sum) for truncation bookkeeping.
struct AlphaSeries {
  double used = 0.0;
  double remainder = 0.0;
};

AlphaSeries alpha_series(const detail::CompiledLandscape& cl, const AlphaSum& spec) {
  const auto& schedule = cl.source().schedule;
  double exact = 0.0;
  if (schedule.kind == ContinuationSchedule::Kind::Geometric) {
    exact = schedule.base / (1.0 - schedule.base);
  } else {
    for (double v : schedule.values) exact += v;
  }
  if (spec.mode == AlphaSum::Mode::Exact) return {exact, 0.0};
  if (spec.stage_cutoff < 1) {
    throw Error(ErrorCode::InvalidCutoff, "alpha stage cutoff must be >= 1");
  }
  double used = 0.0;
  for (int x = 1; x <= spec.stage_cutoff; ++x) {
    double a = cl.alpha(x);
    if (a == 0.0) break;
    used += a;
  }
  return {used, std::max(exact - used, 0.0)};
}

struct CollapsedTerms {
  double first = 0.0;     // sum_n sum_m p_mn p_n T_n
  double quadratic = 0.0; // sum_n sum_m p_mn^2 T_n
};

CollapsedTerms collapsed_terms(const detail::CompiledLandscape& cl,
                               const std::vector<double>& p) {
  CollapsedTerms terms;
  std::vector<detail::HopChoice> hops;
  double p0 = 1.0;
  for (int n = 0; n < cl.num_platforms(); ++n) {
    cl.hop_into(n, -1, hops, p0);
    const double t_n = cl.platform(n).dwell_seconds;
    for (const auto& h : hops) {
      terms.first += h.probability * p[n] * t_n;
      terms.quadratic += h.probability * h.probability * t_n;
    }
  }
  return terms;
}

struct Enumerator {
  Enumerator(const detail::CompiledLandscape& compiled, int cutoff,
             const EnumerationOptions& opts)
      : cl(compiled), depth_cutoff(cutoff), options(opts) {}

  const detail::CompiledLandscape& cl;
  int depth_cutoff;
  EnumerationOptions options;

  double expectation = 0.0;
  double total_probability = 0.0;
  std::uint64_t path_count = 0;
  std::vector<PathEntry> paths;
  std::vector<PathStep> stack;

  void emit(TerminalReason reason, double probability, double seconds) {
    if (++path_count > options.max_paths) {
      throw Error(ErrorCode::InstanceTooLarge,
                  "enumeration exceeds " + std::to_string(options.max_paths) + " paths");
    }
    expectation += probability * seconds;
    total_probability += probability;
    if (options.collect_paths) {
      paths.push_back({stack, reason, probability, seconds});
    }
  }

  void walk(int x, int m, int s, double probability, double seconds) {
    int pos = cl.presence_position(m, s);
    const auto* landing = (pos >= 0) ? &cl.landing_choices(m, pos) : nullptr;
    if (landing == nullptr || landing->empty()) {
      emit(TerminalReason::ReturnedAndQuit, probability, seconds);
      return;
    }

    // Pool branch first (mirrors "uniform < pick_probability" in the sampler),
    // then direct; zero-probability branches are skipped.
    const bool pooled = cl.pool_enabled(m);
    const double rho = pooled ? cl.pool_pick_probability(m) : 0.0;
    struct Branch {
      bool via_pool;
      double probability;
    };
    Branch branches[2] = {{true, rho}, {false, pooled ? 1.0 - rho : 1.0}};

    for (const auto& branch : branches) {
      if (branch.probability <= 0.0) continue;
      double p_branch = pooled ? probability * branch.probability : probability;
      for (const auto& choice : *landing) {
        if (choice.probability <= 0.0) continue;
        int n = choice.platform;
        double p_land = p_branch * choice.probability;
        double dwell = cl.platform(n).dwell_seconds *
                       (branch.via_pool ? cl.pool_dwell_multiplier(m) : 1.0);
        double t_land = seconds + dwell;

        PathStep step;
        step.personality = cl.personality(m).id;
        step.platform = cl.platform(n).id;
        step.via_pool = branch.via_pool;

        std::vector<detail::HopChoice> hops;
        double p0 = 1.0;
        cl.hop_into(n, m, hops, p0);

        stack.push_back(step);
        if (p0 > 0.0) emit(TerminalReason::ReturnedAndQuit, p_land * p0, t_land);
        for (const auto& hop : hops) {
          if (hop.probability <= 0.0) continue;
          stack.back().hop_target = cl.personality(hop.personality).id;
          double p_hop = p_land * hop.probability;
          if (x > depth_cutoff) {
            emit(TerminalReason::DepthCutoff, p_hop, t_land);
            continue;
          }
          double a = cl.alpha(x);
          if (a < 1.0) emit(TerminalReason::ContinuationFailed, p_hop * (1.0 - a), t_land);
          if (a > 0.0) walk(x + 1, hop.personality, n, p_hop * a, t_land);
        }
        stack.pop_back();
      }
    }
  }
};

ExpectationResult recursive_impl(const detail::CompiledLandscape& cl, const TripStart& start,
                                 int depth_cutoff) {
  if (depth_cutoff < 0) {
    throw Error(ErrorCode::InvalidCutoff, "depth_cutoff must be >= 0");
  }
  int m0 = 0, s0 = 0, pos0 = 0;
  resolve_start_pair(cl, start, m0, s0, pos0);

  const int num_pers = cl.num_personalities();
  const int num_plat = cl.num_platforms();

  // E_x(m, s): expected remaining time entering stage x at personality m's
  // page on platform s. Backward over x; next holds E_{x+1}.
  std::vector<double> next(static_cast<size_t>(num_pers) * num_plat, 0.0);
  std::vector<double> cur(next.size(), 0.0);
  std::vector<detail::HopChoice> hops;

  for (int x = depth_cutoff + 1; x >= 1; --x) {
    const double a = (x <= depth_cutoff) ? cl.alpha(x) : 0.0;
    for (int m = 0; m < num_pers; ++m) {
      for (int s = 0; s < num_plat; ++s) {
        int pos = cl.presence_position(m, s);
        double value = 0.0;
        if (pos >= 0) {
          const auto& landing = cl.landing_choices(m, pos);
          const double dwell_factor = cl.expected_dwell_factor(m);
          for (const auto& choice : landing) {
            int n = choice.platform;
            double contribution = cl.platform(n).dwell_seconds * dwell_factor;
            if (a > 0.0) {
              double p0 = 1.0;
              cl.hop_into(n, m, hops, p0);
              double extension = 0.0;
              for (const auto& hop : hops) {
                extension += hop.probability *
                             next[static_cast<size_t>(hop.personality) * num_plat + n];
              }
              contribution += a * extension;
            }
            value += choice.probability * contribution;
          }
        }
        cur[static_cast<size_t>(m) * num_plat + s] = value;
      }
    }
    std::swap(cur, next);
  }

  ExpectationResult result;
  result.value_seconds = next[static_cast<size_t>(m0) * num_plat + s0];
  result.cutoff_used = depth_cutoff;
  result.truncation_bound = alpha_tail_mass(cl, depth_cutoff) * cl.max_effective_dwell();
  return result;
}

}  // namespace

ExpectationResult expected_time_recursive(const Landscape& landscape, const TripStart& start,
                                          int depth_cutoff) {
  detail::CompiledLandscape cl(landscape);
  return recursive_impl(cl, start, depth_cutoff);
}

ExpectationResult expected_time_collapsed(const Landscape& landscape,
                                          const PlatformWeights& start_platform_weights,
                                          const AlphaSum& alpha_sum) {
  detail::CompiledLandscape cl(landscape);
  std::vector<double> p = normalize_weights(cl, start_platform_weights);
  CollapsedTerms terms = collapsed_terms(cl, p);
  AlphaSeries series = alpha_series(cl, alpha_sum);

  ExpectationResult result;
  result.value_seconds = terms.first + series.used * terms.quadratic;
  if (alpha_sum.mode == AlphaSum::Mode::Truncated) {
    result.cutoff_used = alpha_sum.stage_cutoff;
    result.truncation_bound = series.remainder * terms.quadratic;
  }
  return result;
}

EnumerationResult enumerate_trips(const Landscape& landscape, const TripStart& start,
                                  int depth_cutoff, const EnumerationOptions& options) {
  if (depth_cutoff < 0) {
    throw Error(ErrorCode::InvalidCutoff, "depth_cutoff must be >= 0");
  }
  detail::CompiledLandscape cl(landscape);
  int m0 = 0, s0 = 0, pos0 = 0;
  resolve_start_pair(cl, start, m0, s0, pos0);

  Enumerator enumerator(cl, depth_cutoff, options);
  enumerator.walk(1, m0, s0, 1.0, 0.0);

  EnumerationResult result;
  result.expectation.value_seconds = enumerator.expectation;
  result.expectation.cutoff_used = depth_cutoff;
  result.expectation.truncation_bound =
      alpha_tail_mass(cl, depth_cutoff) * cl.max_effective_dwell();
  result.total_probability = enumerator.total_probability;
  result.paths = std::move(enumerator.paths);
  return result;
}

SensitivityResult marginal_sensitivity(const Landscape& landscape,
                                       const PlatformWeights& start_platform_weights,
                                       const std::string& platform_i,
                                       const AlphaSum& alpha_sum) {
  detail::CompiledLandscape cl(landscape);
  int i = cl.platform_index(platform_i);
  if (i < 0) throw Error(ErrorCode::UnknownPlatform, "unknown platform '" + platform_i + "'");
  std::vector<double> p = normalize_weights(cl, start_platform_weights);

  std::vector<detail::HopChoice> hops;
  double p0 = 1.0;
  cl.hop_into(i, -1, hops, p0);
  double hop_sum = 0.0;
  double hop_sq_sum = 0.0;
  bool any_hop = false;
  for (const auto& h : hops) {
    hop_sum += h.probability;
    hop_sq_sum += h.probability * h.probability;
    if (h.probability > 0.0) any_hop = true;
  }

  AlphaSeries series = alpha_series(cl, alpha_sum);

  SensitivityResult result;
  result.platform = platform_i;
  result.method = "analytic";
  result.derivative = p[i] * hop_sum + series.used * hop_sq_sum;
  result.positivity_precondition = p[i] > 0.0 && any_hop;
  if (!result.positivity_precondition) {
    result.note = any_hop ? "positivity precondition fails: p_i = 0"
                          : "positivity precondition fails: every hop probability on the "
                            "platform is zero";
  }
  return result;
}

SensitivityResult finite_difference_sensitivity(const Landscape& landscape,
                                                const std::string& platform_i,
                                                const FdSpec& spec) {
  detail::CompiledLandscape cl(landscape);
  int i = cl.platform_index(platform_i);
  if (i < 0) throw Error(ErrorCode::UnknownPlatform, "unknown platform '" + platform_i + "'");
  const double h = spec.step_seconds;
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::InvalidStep, "step_seconds must be > 0");
  }
  const double t_i = landscape.platforms[i].dwell_seconds;
  if (t_i - h <= 0.0) {
    throw Error(ErrorCode::InvalidStep, "step_seconds must stay below the platform dwell time");
  }

  auto evaluate = [&](double dwell) {
    Landscape shifted = landscape;
    shifted.platforms[i].dwell_seconds = dwell;
    if (spec.evaluator == Evaluator::Recursive) {
      return expected_time_recursive(shifted, spec.start, spec.depth_cutoff).value_seconds;
    }
    return expected_time_collapsed(shifted, spec.start_platform_weights, spec.alpha_sum)
        .value_seconds;
  };

  SensitivityResult result;
  result.platform = platform_i;
  result.method = "finite-difference";
  result.derivative = (evaluate(t_i + h) - evaluate(t_i - h)) / (2.0 * h);

  // Report the same positivity context as the analytic route.
  std::vector<detail::HopChoice> hops;
  double p0 = 1.0;
  cl.hop_into(i, -1, hops, p0);
  bool any_hop = false;
  for (const auto& hop : hops) {
    if (hop.probability > 0.0) any_hop = true;
  }
  if (spec.evaluator == Evaluator::Collapsed) {
    std::vector<double> p = normalize_weights(cl, spec.start_platform_weights);
    result.positivity_precondition = p[i] > 0.0 && any_hop;
  } else {
    result.positivity_precondition = any_hop;
  }
  if (!result.positivity_precondition) {
    result.note = "positivity precondition fails";
  }
  return result;
}

}  // namespace pollinator
