#pragma once

// Seeded randomness. Every stream is a std::mt19937_64 whose seed is derived
// from one 64-bit master seed by splitmix64, so results depend only on
// (seed, stream id) and never on scheduling.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace treegibbs {

using Rng = std::mt19937_64;

/// One splitmix64 step; advances state.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Seed of sub-stream `stream` of `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(stream_seed(seed, stream));
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF sampler over indices 0..n-1 with nonnegative weights.
/// Weights need not be normalised.
class DiscreteSampler {
 public:
  DiscreteSampler() = default;
  explicit DiscreteSampler(std::span<const double> weights);

  std::size_t operator()(Rng& g) const;
  std::size_t size() const noexcept { return cdf_.size(); }
  double total() const noexcept { return total_; }

 private:
  std::vector<double> cdf_;
  double total_ = 0.0;
};

}  // namespace treegibbs
