#pragma once

#include <cstdint>

namespace randcub {

/// Counter-based pseudo random generator (SplitMix64).
///
/// The state is a plain 64-bit counter advanced by a fixed odd gamma; each
/// output applies an avalanching finalizer to the counter.  Period is exactly
/// 2^64 and the stream produced by a given seed is identical on every
/// platform, which is what makes trial-level reproducibility contracts
/// possible.  Floating point draws never use std:: distributions because
/// their output is not pinned down by the standard.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in {0,...,n-1}.  The multiplicative method has bias
  /// O(n / 2^53), negligible for the set sizes used here.
  std::uint64_t uniform_index(std::uint64_t n) {
    std::uint64_t v = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    return v < n ? v : n - 1;
  }

 private:
  std::uint64_t state_;
};

/// Fixed stream-derivation function: child stream `stream` of seed `seed`
/// starts at the SplitMix64 finalizer of the counter advanced stream+1 steps.
/// This is the documented mix(master_seed, index) used everywhere streams are
/// split (trials, estimator sub-streams); changing it changes every artifact
/// byte, so it is part of the output contract.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace randcub
