#include "treegibbs/random.hpp"

#include <algorithm>

#include "treegibbs/error.hpp"

namespace treegibbs {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix64(s);
  std::uint64_t t = a ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
  return splitmix64(t);
}

DiscreteSampler::DiscreteSampler(std::span<const double> weights) {
  if (weights.empty()) throw InvalidArgument("DiscreteSampler needs weights");
  cdf_.reserve(weights.size());
  double acc = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("DiscreteSampler weights must be >= 0");
    acc += w;
    cdf_.push_back(acc);
  }
  if (!(acc > 0.0)) throw InvalidArgument("DiscreteSampler weights sum to zero");
  total_ = acc;
}

std::size_t DiscreteSampler::operator()(Rng& g) const {
  const double u = uniform01(g) * total_;
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) {
    // u rounded up to the total; take the last entry with positive weight.
    it = std::lower_bound(cdf_.begin(), cdf_.end(), total_);
  }
  return static_cast<std::size_t>(it - cdf_.begin());
}

}  // namespace treegibbs
