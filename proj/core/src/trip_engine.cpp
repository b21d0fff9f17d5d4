#include "pollinator/trip_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "compiled.hpp"
#include "pollinator/errors.hpp"
#include "pollinator/rng.hpp"

namespace pollinator {

namespace {

constexpr std::uint64_t kBlockSize = 8192;  // trips per reduction block
constexpr std::uint64_t kPoolOffTag = 0x506F6F6C4F666621ULL;  // "PoolOff!"
constexpr std::uint64_t kPoolOnTag = 0x506F6F6C4F6E2121ULL;   // "PoolOn!!"

int pick_landing(const std::vector<detail::LandingChoice>& choices, double u) {
  double cum = 0.0;
  int last_positive = -1;
  for (const auto& c : choices) {
    if (c.probability <= 0.0) continue;
    cum += c.probability;
    last_positive = c.platform;
    if (u < cum) return c.platform;
  }
  return last_positive;
}

struct Sampler {
  const detail::CompiledLandscape& cl;
  int depth_cutoff;

  TripRecord sample(int start_m, int start_s, std::uint64_t seed) const {
    TripRecord record;
    record.seed = seed;
    UniformRng rng(seed);

    int m = start_m;
    int s = start_s;
    for (int x = 1;; ++x) {
      int pos = cl.presence_position(m, s);
      const auto* landing = (pos >= 0) ? &cl.landing_choices(m, pos) : nullptr;
      if (landing == nullptr || landing->empty()) {
        if (x == 1) {
          throw Error(ErrorCode::NoAlternativePlatform,
                      "start personality '" + cl.personality(m).id +
                          "' has no alternative platform with traffic");
        }
        record.terminal_reason = TerminalReason::ReturnedAndQuit;
        break;
      }

      bool via_pool = false;
      if (cl.pool_enabled(m)) {
        via_pool = rng.uniform() < cl.pool_pick_probability(m);
      }

      int n = pick_landing(*landing, rng.uniform());
      double dwell = cl.platform(n).dwell_seconds *
                     (via_pool ? cl.pool_dwell_multiplier(m) : 1.0);

      StageRecord stage;
      stage.stage_index = x;
      stage.personality = cl.personality(m).id;
      stage.platform = cl.platform(n).id;
      stage.dwell_seconds = dwell;
      stage.via_pool = via_pool;

      int hop_m = pick_hop(n, m, rng);
      if (hop_m < 0) {
        record.stages.push_back(std::move(stage));
        record.terminal_reason = TerminalReason::ReturnedAndQuit;
        break;
      }
      stage.hop_target = cl.personality(hop_m).id;
      record.stages.push_back(std::move(stage));

      if (x > depth_cutoff) {
        record.terminal_reason = TerminalReason::DepthCutoff;
        break;
      }
      if (!(rng.uniform() < cl.alpha(x))) {
        record.terminal_reason = TerminalReason::ContinuationFailed;
        break;
      }
      m = hop_m;
      s = n;
    }
    return record;
  }

  // Cumulative walk over positive-weight hop candidates in personality order.
  // Returns -1 (return to pollinator) without consuming a draw when there is
  // no candidate; a uniform landing past the total hop mass also returns -1.
  int pick_hop(int n, int exclude, UniformRng& rng) const {
    double denom = cl.return_weight();
    bool any = false;
    for (const auto& r : cl.residents(n)) {
      if (r.personality == exclude) continue;
      denom += r.weight;
      if (r.weight > 0.0) any = true;
    }
    if (!any) return -1;
    double u = rng.uniform();
    double cum = 0.0;
    for (const auto& r : cl.residents(n)) {
      if (r.personality == exclude || r.weight <= 0.0) continue;
      cum += r.weight / denom;
      if (u < cum) return r.personality;
    }
    return -1;
  }
};

struct BlockPartial {
  std::uint64_t trips = 0;
  double sum_time = 0.0;
  double sum_time_sq = 0.0;
  std::vector<std::uint64_t> landings;
  std::vector<double> seconds;
};

void resolve_start(const detail::CompiledLandscape& cl, const TripStart& start,
                   int& m, int& s) {
  m = cl.personality_index(start.personality);
  if (m < 0) {
    throw Error(ErrorCode::UnknownPersonality,
                "unknown personality '" + start.personality + "'");
  }
  s = cl.platform_index(start.platform);
  if (s < 0) {
    throw Error(ErrorCode::UnknownPlatform, "unknown platform '" + start.platform + "'");
  }
  if (cl.presence_position(m, s) < 0) {
    throw Error(ErrorCode::PersonalityNotPresent,
                "personality '" + start.personality + "' is not present on '" +
                    start.platform + "'");
  }
}

TrafficReport reduce_blocks(const detail::CompiledLandscape& cl,
                            const std::vector<BlockPartial>& blocks) {
  TrafficReport report;
  const int num_plat = cl.num_platforms();
  std::vector<std::uint64_t> landings(num_plat, 0);
  std::vector<double> seconds(num_plat, 0.0);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& b : blocks) {
    report.trips += b.trips;
    sum += b.sum_time;
    sum_sq += b.sum_time_sq;
    for (int n = 0; n < num_plat; ++n) {
      landings[n] += b.landings[n];
      seconds[n] += b.seconds[n];
    }
  }

  report.mean_trip_seconds = sum / static_cast<double>(report.trips);
  if (report.trips > 1) {
    double n = static_cast<double>(report.trips);
    double var = (sum_sq - n * report.mean_trip_seconds * report.mean_trip_seconds) / (n - 1.0);
    report.standard_error = std::sqrt(std::max(var, 0.0) / n);
  }

  std::uint64_t total_landings = 0;
  for (int n = 0; n < num_plat; ++n) total_landings += landings[n];
  report.platforms.reserve(num_plat);
  for (int n = 0; n < num_plat; ++n) {
    PlatformTraffic t;
    t.platform = cl.platform(n).id;
    t.landings = landings[n];
    t.total_seconds = seconds[n];
    t.share_of_landings = total_landings == 0
                              ? 0.0
                              : static_cast<double>(landings[n]) /
                                    static_cast<double>(total_landings);
    report.platforms.push_back(std::move(t));
  }
  return report;
}

void accumulate(BlockPartial& block, const detail::CompiledLandscape& cl,
                const TripRecord& record) {
  block.trips += 1;
  double total = record.total_seconds();
  block.sum_time += total;
  block.sum_time_sq += total * total;
  for (const auto& stage : record.stages) {
    int n = cl.platform_index(stage.platform);
    block.landings[n] += 1;
    block.seconds[n] += stage.dwell_seconds;
  }
}

TrafficReport run_monte_carlo_impl(const detail::CompiledLandscape& cl,
                                   const TripStart& start, std::uint64_t n_trips,
                                   std::uint64_t master_seed, const McOptions& options) {
  if (n_trips < 1) {
    throw Error(ErrorCode::InvalidTripCount, "n_trips must be >= 1");
  }
  if (options.depth_cutoff < 0) {
    throw Error(ErrorCode::InvalidCutoff, "depth_cutoff must be >= 0");
  }
  int start_m = 0;
  int start_s = 0;
  resolve_start(cl, start, start_m, start_s);
  // Fail fast on an invalid start pair rather than n_trips times.
  if (cl.landing_choices(start_m, cl.presence_position(start_m, start_s)).empty()) {
    throw Error(ErrorCode::NoAlternativePlatform,
                "start personality '" + start.personality +
                    "' has no alternative platform with traffic");
  }

  Sampler sampler{cl, options.depth_cutoff};
  const int num_plat = cl.num_platforms();
  const std::uint64_t num_blocks = (n_trips + kBlockSize - 1) / kBlockSize;
  std::vector<BlockPartial> blocks(num_blocks);
  for (auto& b : blocks) {
    b.landings.assign(num_plat, 0);
    b.seconds.assign(num_plat, 0.0);
  }

  auto run_block = [&](std::uint64_t block_idx) {
    BlockPartial& block = blocks[block_idx];
    const std::uint64_t begin = block_idx * kBlockSize;
    const std::uint64_t end = std::min(begin + kBlockSize, n_trips);
    for (std::uint64_t i = begin; i < end; ++i) {
      TripRecord record = sampler.sample(start_m, start_s, trip_seed(master_seed, i));
      accumulate(block, cl, record);
      if (options.trace) options.trace(record);
    }
  };

  unsigned hw = std::thread::hardware_concurrency();
  std::uint64_t workers = options.workers > 0 ? static_cast<std::uint64_t>(options.workers)
                                              : std::max(1u, hw);
  workers = std::min<std::uint64_t>(workers, num_blocks);

  if (options.trace || workers <= 1) {
    for (std::uint64_t b = 0; b < num_blocks; ++b) run_block(b);
  } else {
    std::atomic<std::uint64_t> next_block{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::uint64_t b = next_block.fetch_add(1);
          if (b >= num_blocks) return;
          run_block(b);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  return reduce_blocks(cl, blocks);
}

}  // namespace

const char* terminal_reason_name(TerminalReason reason) {
  switch (reason) {
    case TerminalReason::ReturnedAndQuit: return "returned_and_quit";
    case TerminalReason::ContinuationFailed: return "continuation_failed";
    case TerminalReason::DepthCutoff: return "depth_cutoff";
  }
  return "unknown";
}

double TripRecord::total_seconds() const {
  double total = 0.0;
  for (const auto& stage : stages) total += stage.dwell_seconds;
  return total;
}

TripRecord sample_trip(const Landscape& landscape, const TripStart& start,
                       std::uint64_t seed, int depth_cutoff) {
  if (depth_cutoff < 0) {
    throw Error(ErrorCode::InvalidCutoff, "depth_cutoff must be >= 0");
  }
  detail::CompiledLandscape cl(landscape);
  int m = 0;
  int s = 0;
  resolve_start(cl, start, m, s);
  Sampler sampler{cl, depth_cutoff};
  return sampler.sample(m, s, seed);
}

TrafficReport run_monte_carlo(const Landscape& landscape, const TripStart& start,
                              std::uint64_t n_trips, std::uint64_t master_seed,
                              const McOptions& options) {
  detail::CompiledLandscape cl(landscape);
  return run_monte_carlo_impl(cl, start, n_trips, master_seed, options);
}

PoolComparison run_pool_comparison(const Landscape& landscape, const TripStart& start,
                                   std::uint64_t n_trips, std::uint64_t master_seed,
                                   const McOptions& options) {
  bool any_pool = false;
  for (const auto& m : landscape.personalities) {
    if (m.pool && m.pool->enabled) {
      any_pool = true;
      break;
    }
  }
  if (!any_pool) {
    throw Error(ErrorCode::NoPoolConfigured, "no personality has an enabled pool");
  }

  Landscape disabled = landscape;
  for (auto& m : disabled.personalities) {
    if (m.pool) m.pool->enabled = false;
  }

  PoolComparison result;
  result.disabled = run_monte_carlo(disabled, start, n_trips,
                                    stream_seed(master_seed, kPoolOffTag), options);
  result.enabled = run_monte_carlo(landscape, start, n_trips,
                                   stream_seed(master_seed, kPoolOnTag), options);
  return result;
}

}  // namespace pollinator
