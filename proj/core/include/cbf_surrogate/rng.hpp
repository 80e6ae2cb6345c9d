#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cbf_surrogate {

// SplitMix64 (Steele, Lea & Flood 2014): a Weyl-sequence counter passed through
// a fixed 64-bit finalizer. Chosen over the <random> engines/distributions so
// that every derived quantity (uniforms, normals, shuffles) is bit-identical
// across standard libraries.
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller (one draw per call; two uniforms consumed).
  double normal() noexcept;
  // Uniform integer in [0, n) by rejection sampling; n > 0.
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  std::uint64_t state_;
};

// Mixes a stream identifier into a seed, giving independent substreams
// (e.g. one per outer fold) from a single user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Fisher-Yates shuffle driven by SplitMix64::below.
void shuffle(std::span<std::size_t> values, SplitMix64& rng) noexcept;

}  // namespace cbf_surrogate
