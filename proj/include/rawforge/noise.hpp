#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rawforge/image.hpp"
#include "rawforge/rng.hpp"

namespace rawforge {

// Variance model  var(y | x) = lambda_read + lambda_shot * x  in [0, 1] units.
struct NoiseProfile {
  std::string name;
  double lambda_shot = 0.0;
  double lambda_read = 0.0;

  friend bool operator==(const NoiseProfile&, const NoiseProfile&) = default;
};

// A named profile with log-uniform sampling ranges. min == max pins the value.
struct ProfileRange {
  std::string name;
  double shot_min = 0.0;
  double shot_max = 0.0;
  double read_min = 0.0;
  double read_max = 0.0;

  void validate() const;
};

struct ProfileRegistry {
  std::vector<ProfileRange> profiles;

  void validate() const;
  const ProfileRange* find(std::string_view name) const;

  // Four built-in profiles from noisy small sensors down to clean DSLRs.
  static ProfileRegistry defaults();
  // A single profile pinned at (lambda_shot, lambda_read).
  static ProfileRegistry fixed(const NoiseProfile& profile);
};

enum class NoiseClamp { kClamp, kNone };

// y = x + sqrt(lambda_read + lambda_shot * x) * z with z ~ N(0, 1).
// Sample i of the channel-last buffer draws from counter i of the stream
// keyed by `seed`, so the output only depends on (input, profile, seed).
// kNone keeps pre-clamp values for calibration and moment checks.
Image sample_shot_read(const Image& img, const NoiseProfile& profile, std::uint64_t seed,
                       NoiseClamp clamp = NoiseClamp::kClamp);

// Uniform profile choice, then log-uniform shot and read draws.
NoiseProfile draw_profile(const ProfileRegistry& registry, Rng& rng);
NoiseProfile draw_profile(const ProfileRegistry& registry, std::uint64_t seed);

struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0;
};

// Ordinary least squares fit of variance against mean; negative
// coefficients are clamped to zero. Needs two distinct mean levels.
NoiseProfile estimate_profile(std::span<const MeanVariance> samples);

// Mean and population variance of every channel of a flat frame.
std::vector<MeanVariance> flat_field_stats(const Image& flat);

}  // namespace rawforge
