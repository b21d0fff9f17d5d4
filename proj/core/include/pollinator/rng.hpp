#pragma once

#include <cstdint>
#include <random>

namespace pollinator {

// Deterministic generator "pmt64/v1", used for every random draw in the
// project. Per-trip engine: std::mt19937_64 seeded with a 64-bit value.
// Uniforms take the top 53 bits of each engine output, giving doubles in
// [0, 1) that are identical on every platform and at every parallelism level.

/// splitmix64 finalizer; the mixing core of all seed derivations.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// Counter-based per-trip seed: the (trip_index + 1)-th splitmix64 output for
/// state master_seed. Pure function of (master_seed, trip_index), so workers
/// can claim trips in any order without changing any trip's randomness.
inline std::uint64_t trip_seed(std::uint64_t master_seed, std::uint64_t trip_index) {
  return mix64(master_seed + (trip_index + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Derives an independent named seed stream from a master seed.
inline std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t stream_tag) {
  return mix64(master_seed ^ stream_tag);
}

/// Uniform [0, 1) draws backed by std::mt19937_64.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pollinator
