#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>

#include <unistd.h>

#include "rawforge/image.hpp"
#include "rawforge/kernels.hpp"
#include "rawforge/rng.hpp"

namespace rawforge::testing {

inline Image random_image(int w, int h, int c, std::uint64_t seed) {
  Rng rng(seed);
  Image img(w, h, c);
  for (float& v : img.data) v = float(rng.uniform());
  return img;
}

inline Image constant_image(int w, int h, const float (&per_channel)[4]) {
  Image img(w, h, 4);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = per_channel[i % 4];
  return img;
}

// Smooth random texture: a few random sinusoids per channel plus a soft
// checker, kept away from 0 and 1.
inline Image textured_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  Image img(w, h, 4);
  for (int c = 0; c < 4; ++c) {
    double fx[4], fy[4], ph[4], amp[4];
    for (int k = 0; k < 4; ++k) {
      fx[k] = rng.uniform(0.05, 0.9);
      fy[k] = rng.uniform(0.05, 0.9);
      ph[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
      amp[k] = rng.uniform(0.03, 0.1);
    }
    const double base = rng.uniform(0.3, 0.6);
    const int cell = 3 + int(rng.index(6));
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double v = base + (((x / cell) + (y / cell)) % 2 ? 0.08 : -0.08);
        for (int k = 0; k < 4; ++k) v += amp[k] * std::sin(fx[k] * x + fy[k] * y + ph[k]);
        img.at(x, y, c) = float(std::clamp(v, 0.02, 0.98));
      }
    }
  }
  return img;
}

// 16x16 hash pattern shared with the SSIM reference values.
inline double hash_value(int x, int y, int seed) {
  std::uint32_t v = (std::uint32_t(x) * 73856093u) ^ (std::uint32_t(y) * 19349663u) ^ (std::uint32_t(seed) * 83492791u);
  v = v * 2654435761u;
  return double((v >> 8) % 1024) / 1023.0;
}

// Direct nested-loop convolution with reflect-101 borders, in double.
inline Image naive_convolve(const Image& img, const Kernel& k) {
  auto reflect = [](int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
    return i;
  };
  const int r = k.size / 2;
  Image out(img.width, img.height, img.channels);
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        double s = 0.0;
        for (int j = -r; j <= r; ++j) {
          for (int i = -r; i <= r; ++i) {
            s += k.at(i + r, j + r) * img.at(reflect(x - i, img.width), reflect(y - j, img.height), c);
          }
        }
        out.at(x, y, c) = float(std::clamp(s, 0.0, 1.0));
      }
    }
  }
  return out;
}

inline double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(double(a.data[i]) - double(b.data[i])));
  return m;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("rawforge_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

}  // namespace rawforge::testing
