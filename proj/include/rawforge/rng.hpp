#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>

namespace rawforge {

// All randomness in the library is derived from 64-bit seeds through the
// SplitMix64 mixer and xoshiro256**. Floating conversions are done here
// rather than through <random> distributions, whose outputs differ
// between standard library implementations.

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Element `counter` of the SplitMix64 stream started at `seed`.
constexpr std::uint64_t splitmix_at(std::uint64_t seed, std::uint64_t counter) {
  return mix64(seed + (counter + 1) * kGoldenGamma);
}

// Seed of an independent per-item stream, e.g. (master seed, image index).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ splitmix_at(index, 0x5EED));
}

// [0, 1) with 53 random bits.
constexpr double unit_from_bits(std::uint64_t bits) {
  return double(bits >> 11) * 0x1.0p-53;
}

// (0, 1], safe for log().
constexpr double open_unit_from_bits(std::uint64_t bits) {
  return double((bits >> 11) + 1) * 0x1.0p-53;
}

// Pair of standard normal samples by Box-Muller from two raw draws.
inline void box_muller(std::uint64_t a, std::uint64_t b, double& z0, double& z1) {
  const double radius = std::sqrt(-2.0 * std::log(open_unit_from_bits(a)));
  const double angle = 2.0 * std::numbers::pi * unit_from_bits(b);
  z0 = radius * std::cos(angle);
  z1 = radius * std::sin(angle);
}

// Sequential generator (xoshiro256**) used for parameter sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    for (int i = 0; i < 4; ++i) state_[i] = splitmix_at(seed, std::uint64_t(i));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  double uniform() { return unit_from_bits(next()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Log-uniform on [lo, hi]; degenerate ranges return lo.
  double log_uniform(double lo, double hi) {
    const double u = uniform();
    if (!(lo < hi)) return lo;
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * u);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n), n > 0 (multiply-high reduction).
  std::size_t index(std::size_t n) {
    __extension__ using u128 = unsigned __int128;
    return std::size_t((static_cast<u128>(next()) * n) >> 64);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4];
};

}  // namespace rawforge
