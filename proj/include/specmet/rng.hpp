// Counter-based deterministic RNG used by every synthesis routine.
//
// Output i of a stream is mix64(key + (i+1)*GOLDEN) where mix64 is the
// SplitMix64 finalizer and key is derived from (seed, stream). Pure integer
// arithmetic, so identical sequences on every platform, and random access is
// possible even though we only use it sequentially.
#pragma once

#include <cmath>
#include <cstdint>

namespace specmet {

inline constexpr std::uint64_t kRngGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed + kRngGolden * (mix64(stream) | 1))) {}

  std::uint64_t next_u64() { return mix64(key_ + kRngGolden * ++counter_); }

  // uniform on [0, 1), 53 random bits
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0, 1], safe to take log of
  double next_unit_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // standard normal via Box-Muller (cosine branch only)
  double next_gaussian() {
    const double u1 = next_unit_pos();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace specmet
