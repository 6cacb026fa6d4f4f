#pragma once

#include <cstdint>

namespace robayes {

/// Root seed plus the experiment id used for counter-based stream splitting.
/// Identical (seed, experiment_id, replicate_id) always reproduce the same
/// draws, independent of thread scheduling or platform.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t experiment_id = 0;
};

/// Deterministic 64-bit generator (splitmix64) whose initial state is an
/// avalanche mix of (seed, experiment id, replicate id).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t experiment_id,
            std::uint64_t replicate_id) {
    state_ = avalanche(seed + 0x9E3779B97F4A7C15ull);
    state_ = avalanche(state_ ^ avalanche(experiment_id + 0xBF58476D1CE4E5B9ull));
    state_ = avalanche(state_ ^ avalanche(replicate_id + 0x94D049BB133111EBull));
  }
  RngStream(const RngSeed& seed, std::uint64_t replicate_id)
      : RngStream(seed.seed, seed.experiment_id, replicate_id) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return avalanche_step(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return (next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) {
    return next_u64() % bound;  // bias is irrelevant at our bounds (<2^32)
  }

 private:
  std::uint64_t state_ = 0;

  static std::uint64_t avalanche_step(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  static std::uint64_t avalanche(std::uint64_t z) {
    return avalanche_step(z + 0x9E3779B97F4A7C15ull);
  }
};

}  // namespace robayes
