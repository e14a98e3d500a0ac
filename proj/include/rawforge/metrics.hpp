#pragma once

#include <limits>
#include <span>

#include "rawforge/image.hpp"
#include "rawforge/isp.hpp"

namespace rawforge {

// Returned by psnr() for identical inputs.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

double psnr(std::span<const float> a, std::span<const float> b, double peak);
double psnr(const Image& a, const Image& b, double peak = 1.0);
double psnr(const Rgb8Image& a, const Rgb8Image& b, double peak = 255.0);

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

// Single-scale SSIM, 11x11 Gaussian window (sigma 1.5), population
// statistics, averaged over the valid window positions and then over
// channels. Both dimensions must be at least 11.
double ssim(const Image& a, const Image& b, double data_range = 1.0);
double ssim(const Rgb8Image& a, const Rgb8Image& b);

struct EvaluationReport {
  double psnr_raw = 0.0;
  double ssim_raw = 0.0;
  double psnr_rgb = 0.0;
  double ssim_rgb = 0.0;
};

// RAW metrics on the packed data (peak 1); RGB metrics on the 8-bit
// renders of both inputs through the same ISP (peak 255).
EvaluationReport evaluate_pair(const Image& clean, const Image& restored, const IspParams& isp);

}  // namespace rawforge
