#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace dualq {

// Counter-based 64-bit generator: the k-th output is a SplitMix64 finalizer
// applied to seed + k * golden_gamma. Same seed, same sequence. Substreams
// are derived deterministically from (seed, index).
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0) : seed_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(seed_ + (++counter_) * kGamma); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  // Uniform on (0, 1].
  double uniform_open_left() { return 1.0 - uniform(); }
  double normal() { return normal_(*this); }

  RngStream substream(std::uint64_t index) const {
    return RngStream(mix(seed_ ^ mix(index + 0x6a09e667f3bcc909ULL)));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z);

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace dualq
