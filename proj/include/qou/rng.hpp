#pragma once

#include <cstdint>
#include <limits>

namespace qou {

// Counter-based splittable generator. A stream is a 64-bit key; output i is
// the SplitMix64 finalizer applied to key + i*golden, so draws depend only on
// (key, counter) and never on scheduling. fork(id) derives an independent
// substream key, which is how paths and sub-processes (volatility vs driving
// Brownian) get their own streams from one master seed.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) noexcept : key_(mix(seed ^ kSalt)) {}

  SplitRng fork(std::uint64_t stream_id) const noexcept {
    return SplitRng(FromKey{}, mix(key_ ^ mix(stream_id + kGolden)));
  }

  std::uint64_t next_u64() noexcept {
    counter_ += 1;
    return mix(key_ + counter_ * kGolden);
  }

  // Uniform on (0,1); never returns 0 or 1.
  double uniform01() noexcept {
    const std::uint64_t bits = next_u64() >> 11;  // 53 bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; second value cached.
  double gauss() noexcept;

  double exponential() noexcept;  // mean 1

  // Exact Poisson; large means are split using infinite divisibility.
  std::uint64_t poisson(double mean);

  // Symmetric alpha-stable with unit scale (Chambers-Mallows-Stuck).
  // alpha = 2 gives a centered Gaussian with variance 2.
  double stable_symmetric(double alpha);

 private:
  struct FromKey {};
  SplitRng(FromKey, std::uint64_t key) noexcept : key_(key) {}

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kSalt = 0x6a09e667f3bcc908ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_gauss_ = 0.0;
  bool has_cached_gauss_ = false;
};

// Conventional stream tags so independent sub-processes never collide.
namespace stream {
inline constexpr std::uint64_t kDriver = 1;
inline constexpr std::uint64_t kVolatility = 2;
inline constexpr std::uint64_t kBrownian = 3;
}  // namespace stream

// Per-path seed derivation: scheduling-independent ensembles use
// derive_seed(master, path_index) for path streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t id) noexcept;

}  // namespace qou
