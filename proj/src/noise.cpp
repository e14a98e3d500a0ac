#include "rawforge/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rawforge/error.hpp"

namespace rawforge {

void ProfileRange::validate() const {
  auto check = [&](double lo, double hi, const char* what) {
    if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
      throw InvalidArgument("noise profile '" + name + "': " + what + " range must satisfy 0 <= min <= max");
    }
    if (lo < hi && !(lo > 0.0)) {
      throw InvalidArgument("noise profile '" + name + "': log-uniform " + what + " range needs a positive minimum");
    }
  };
  if (name.empty()) throw InvalidArgument("noise profile needs a name");
  if (name.find_first_of(" \t\r\n=#") != std::string::npos) {
    throw InvalidArgument("noise profile name '" + name + "' must not contain whitespace, '=' or '#'");
  }
  check(shot_min, shot_max, "lambda_s");
  check(read_min, read_max, "lambda_r");
}

void ProfileRegistry::validate() const {
  if (profiles.empty()) throw InvalidArgument("noise profile registry is empty");
  for (const auto& p : profiles) p.validate();
}

const ProfileRange* ProfileRegistry::find(std::string_view name) const {
  for (const auto& p : profiles) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

ProfileRegistry ProfileRegistry::defaults() {
  // Variances in normalized [0, 1] units.
  return ProfileRegistry{{
      {"smartphone_high", 5e-3, 1.2e-2, 1e-4, 1e-3},
      {"smartphone_mid", 1e-3, 5e-3, 1e-5, 1e-4},
      {"dslr_mid", 3e-4, 1e-3, 1e-6, 1e-5},
      {"dslr_low", 1e-4, 3e-4, 1e-7, 1e-6},
  }};
}

ProfileRegistry ProfileRegistry::fixed(const NoiseProfile& profile) {
  return ProfileRegistry{{{profile.name.empty() ? "fixed" : profile.name, profile.lambda_shot, profile.lambda_shot,
                           profile.lambda_read, profile.lambda_read}}};
}

Image sample_shot_read(const Image& img, const NoiseProfile& profile, std::uint64_t seed, NoiseClamp clamp) {
  if (!(profile.lambda_shot >= 0.0) || !(profile.lambda_read >= 0.0)) {
    throw InvalidArgument("noise parameters must be nonnegative");
  }
  Image out = img;
  if (profile.lambda_shot == 0.0 && profile.lambda_read == 0.0) return out;
  const std::size_t n = img.data.size();
  auto perturb = [&](std::size_t i, double z) {
    const double x = img.data[i];
    const double sigma = std::sqrt(std::max(profile.lambda_read + profile.lambda_shot * x, 0.0));
    double y = x + sigma * z;
    if (clamp == NoiseClamp::kClamp) y = std::clamp(y, 0.0, 1.0);
    out.data[i] = float(y);
  };
  // Samples 2k and 2k+1 share one Box-Muller pair built from stream counters 2k and 2k+1.
  for (std::size_t i = 0; i < n; i += 2) {
    double z0 = 0.0;
    double z1 = 0.0;
    box_muller(splitmix_at(seed, i), splitmix_at(seed, i + 1), z0, z1);
    perturb(i, z0);
    if (i + 1 < n) perturb(i + 1, z1);
  }
  return out;
}

NoiseProfile draw_profile(const ProfileRegistry& registry, Rng& rng) {
  registry.validate();
  const ProfileRange& range = registry.profiles[rng.index(registry.profiles.size())];
  NoiseProfile p;
  p.name = range.name;
  p.lambda_shot = rng.log_uniform(range.shot_min, range.shot_max);
  p.lambda_read = rng.log_uniform(range.read_min, range.read_max);
  return p;
}

NoiseProfile draw_profile(const ProfileRegistry& registry, std::uint64_t seed) {
  Rng rng(seed);
  return draw_profile(registry, rng);
}

NoiseProfile estimate_profile(std::span<const MeanVariance> samples) {
  if (samples.size() < 2) throw InvalidArgument("noise estimation needs at least two mean levels");
  const double n = double(samples.size());
  double mx = 0.0;
  double mv = 0.0;
  for (const auto& s : samples) {
    mx += s.mean;
    mv += s.variance;
  }
  mx /= n;
  mv /= n;
  double sxx = 0.0;
  double sxv = 0.0;
  for (const auto& s : samples) {
    sxx += (s.mean - mx) * (s.mean - mx);
    sxv += (s.mean - mx) * (s.variance - mv);
  }
  if (!(sxx > 1e-24 * std::max(1.0, mx * mx))) {
    throw InvalidArgument("noise estimation needs at least two distinct mean levels");
  }
  const double slope = sxv / sxx;
  const double intercept = mv - slope * mx;
  NoiseProfile p;
  p.name = "estimated";
  p.lambda_shot = std::max(slope, 0.0);
  p.lambda_read = std::max(intercept, 0.0);
  return p;
}

std::vector<MeanVariance> flat_field_stats(const Image& flat) {
  if (flat.empty()) throw InvalidArgument("flat frame is empty");
  std::vector<MeanVariance> stats(flat.channels);
  const std::size_t n = flat.pixel_count();
  for (int c = 0; c < flat.channels; ++c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += flat.data[i * flat.channels + c];
    const double mean = sum / double(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = flat.data[i * flat.channels + c] - mean;
      ss += d * d;
    }
    stats[c] = {mean, ss / double(n)};
  }
  return stats;
}

}  // namespace rawforge
