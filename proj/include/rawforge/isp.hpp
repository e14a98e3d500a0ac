#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "rawforge/image.hpp"
#include "rawforge/raw_core.hpp"

namespace rawforge {

enum class GammaMode { kSrgb, kNone };
enum class ToneMapMode { kReinhard, kNone };

std::string_view to_string(GammaMode mode);
std::string_view to_string(ToneMapMode mode);
GammaMode parse_gamma(std::string_view name);
ToneMapMode parse_tonemap(std::string_view name);

using WhiteBalanceGains = std::array<double, 3>;
// Row-major 3x3.
using ColorMatrix = std::array<double, 9>;

inline constexpr ColorMatrix kIdentityCcm{1, 0, 0, 0, 1, 0, 0, 0, 1};

// Fixed renderer settings. Compare methods only through one instance.
struct IspParams {
  WhiteBalanceGains wb_gains{1.0, 1.0, 1.0};
  ColorMatrix ccm = kIdentityCcm;
  GammaMode gamma = GammaMode::kSrgb;
  ToneMapMode tonemap = ToneMapMode::kNone;

  // Gains > 0 and every CCM row summing to 1 within 1e-6.
  void validate() const;
};

// Bilinear interpolation of the missing colors, reflect-101 boundaries.
// Input: normalized 1-channel mosaic. Output: 3-channel linear RGB.
Image demosaic_bilinear(const Image& mosaic, CfaPattern cfa);

Image white_balance(const Image& rgb, const WhiteBalanceGains& gains);
Image apply_ccm(const Image& rgb, const ColorMatrix& ccm);

double srgb_encode(double v);
Image gamma_encode(const Image& rgb, GammaMode mode);

// 2v / (1 + v): Reinhard rescaled so that 1 maps to 1.
double reinhard(double v);
Image tone_map(const Image& rgb, ToneMapMode mode);

// Clamp to [0, 1], scale by 255, round half away from zero.
std::uint8_t quantize8(double v);

// unpack -> demosaic -> white balance -> CCM -> tone map -> gamma -> 8 bit.
Rgb8Image render_rgb(const Image& packed, const IspParams& params);

}  // namespace rawforge
