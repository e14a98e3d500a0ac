#include "rawforge/isp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rawforge/error.hpp"

namespace rawforge {

std::string_view to_string(GammaMode mode) { return mode == GammaMode::kSrgb ? "srgb" : "none"; }
std::string_view to_string(ToneMapMode mode) { return mode == ToneMapMode::kReinhard ? "reinhard" : "none"; }

GammaMode parse_gamma(std::string_view name) {
  if (name == "srgb") return GammaMode::kSrgb;
  if (name == "none") return GammaMode::kNone;
  throw InvalidArgument("unknown gamma mode '" + std::string(name) + "'");
}

ToneMapMode parse_tonemap(std::string_view name) {
  if (name == "reinhard") return ToneMapMode::kReinhard;
  if (name == "none") return ToneMapMode::kNone;
  throw InvalidArgument("unknown tone mapping mode '" + std::string(name) + "'");
}

void IspParams::validate() const {
  for (double g : wb_gains) {
    if (!(g > 0.0) || !std::isfinite(g)) throw InvalidArgument("white balance gains must be positive");
  }
  for (int r = 0; r < 3; ++r) {
    const double s = ccm[3 * r] + ccm[3 * r + 1] + ccm[3 * r + 2];
    if (std::abs(s - 1.0) > 1e-6) {
      throw InvalidArgument("color matrix row " + std::to_string(r) + " sums to " + std::to_string(s) + ", expected 1");
    }
  }
}

namespace {

int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

// Bilinear weights over the 3x3 neighbourhood.
constexpr double kRedBlueStencil[3][3] = {{1, 2, 1}, {2, 4, 2}, {1, 2, 1}};
constexpr double kGreenStencil[3][3] = {{0, 1, 0}, {1, 4, 1}, {0, 1, 0}};

}  // namespace

Image demosaic_bilinear(const Image& mosaic, CfaPattern cfa) {
  if (mosaic.channels != 1) throw InvalidArgument("demosaic_bilinear: mosaic must have one channel");
  if (mosaic.width % 2 != 0 || mosaic.height % 2 != 0) {
    throw InvalidArgument("demosaic_bilinear: mosaic dimensions must be even");
  }
  const int w = mosaic.width;
  const int h = mosaic.height;
  Image out(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sum[3] = {0, 0, 0};
      double weight[3] = {0, 0, 0};
      for (int dy = -1; dy <= 1; ++dy) {
        const int sy = reflect101(y + dy, h);
        for (int dx = -1; dx <= 1; ++dx) {
          const int sx = reflect101(x + dx, w);
          // Reflection keeps coordinate parity, so the sample color is that of (x+dx, y+dy).
          const CfaColor color = cfa_color(cfa, sx, sy);
          const int c = static_cast<int>(color);
          const double k = color == CfaColor::kGreen ? kGreenStencil[dy + 1][dx + 1] : kRedBlueStencil[dy + 1][dx + 1];
          sum[c] += k * mosaic.at(sx, sy);
          weight[c] += k;
        }
      }
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = float(sum[c] / weight[c]);
    }
  }
  return out;
}

Image white_balance(const Image& rgb, const WhiteBalanceGains& gains) {
  if (rgb.channels != 3) throw InvalidArgument("white_balance expects 3 channels");
  Image out = rgb;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = float(std::clamp(double(out.data[i]) * gains[i % 3], 0.0, 1.0));
  }
  return out;
}

Image apply_ccm(const Image& rgb, const ColorMatrix& ccm) {
  if (rgb.channels != 3) throw InvalidArgument("apply_ccm expects 3 channels");
  Image out = rgb;
  for (std::size_t p = 0; p < out.pixel_count(); ++p) {
    const double r = rgb.data[3 * p];
    const double g = rgb.data[3 * p + 1];
    const double b = rgb.data[3 * p + 2];
    for (int row = 0; row < 3; ++row) {
      const double v = ccm[3 * row] * r + ccm[3 * row + 1] * g + ccm[3 * row + 2] * b;
      out.data[3 * p + row] = float(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

double srgb_encode(double v) {
  v = std::clamp(v, 0.0, 1.0);
  if (v <= 0.0031308) return 12.92 * v;
  return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

Image gamma_encode(const Image& rgb, GammaMode mode) {
  Image out = rgb;
  if (mode == GammaMode::kSrgb) {
    for (float& v : out.data) v = float(srgb_encode(v));
  }
  return out;
}

double reinhard(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return 2.0 * v / (1.0 + v);
}

Image tone_map(const Image& rgb, ToneMapMode mode) {
  Image out = rgb;
  if (mode == ToneMapMode::kReinhard) {
    for (float& v : out.data) v = float(reinhard(v));
  }
  return out;
}

std::uint8_t quantize8(double v) {
  if (std::isnan(v)) return 0;
  return std::uint8_t(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

Rgb8Image render_rgb(const Image& packed, const IspParams& params) {
  params.validate();
  Image rgb = demosaic_bilinear(unpack_rggb(packed, CfaPattern::kRggb), CfaPattern::kRggb);
  rgb = white_balance(rgb, params.wb_gains);
  rgb = apply_ccm(rgb, params.ccm);
  rgb = tone_map(rgb, params.tonemap);
  rgb = gamma_encode(rgb, params.gamma);
  Rgb8Image out{rgb.width, rgb.height, std::vector<std::uint8_t>(rgb.data.size())};
  for (std::size_t i = 0; i < rgb.data.size(); ++i) out.data[i] = quantize8(rgb.data[i]);
  return out;
}

}  // namespace rawforge
