#include "rawforge/raw_core.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "rawforge/error.hpp"

namespace rawforge {

std::string_view to_string(CfaPattern cfa) {
  switch (cfa) {
    case CfaPattern::kRggb: return "RGGB";
    case CfaPattern::kBggr: return "BGGR";
    case CfaPattern::kGrbg: return "GRBG";
    case CfaPattern::kGbrg: return "GBRG";
  }
  return "?";
}

CfaPattern parse_cfa(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (upper == "RGGB") return CfaPattern::kRggb;
  if (upper == "BGGR") return CfaPattern::kBggr;
  if (upper == "GRBG") return CfaPattern::kGrbg;
  if (upper == "GBRG") return CfaPattern::kGbrg;
  throw InvalidArgument("unknown CFA pattern '" + std::string(name) + "'");
}

namespace {

// Tile colors in raster order: (0,0) (1,0) (0,1) (1,1).
std::array<CfaColor, 4> tile_colors(CfaPattern cfa) {
  using enum CfaColor;
  switch (cfa) {
    case CfaPattern::kRggb: return {kRed, kGreen, kGreen, kBlue};
    case CfaPattern::kBggr: return {kBlue, kGreen, kGreen, kRed};
    case CfaPattern::kGrbg: return {kGreen, kRed, kBlue, kGreen};
    case CfaPattern::kGbrg: return {kGreen, kBlue, kRed, kGreen};
  }
  return {kRed, kGreen, kGreen, kBlue};
}

void require_mosaic(const Image& m, const char* op) {
  if (m.channels != 1) throw InvalidArgument(std::string(op) + ": mosaic must have one channel");
  if (m.width % 2 != 0 || m.height % 2 != 0) {
    throw InvalidArgument(std::string(op) + ": mosaic dimensions must be even, got " +
                          std::to_string(m.width) + "x" + std::to_string(m.height));
  }
}

}  // namespace

CfaColor cfa_color(CfaPattern cfa, int x, int y) {
  return tile_colors(cfa)[(y & 1) * 2 + (x & 1)];
}

std::array<std::array<int, 2>, 4> tile_offsets(CfaPattern cfa) {
  const auto colors = tile_colors(cfa);
  std::array<std::array<int, 2>, 4> offsets{};
  bool first_green = true;
  for (int k = 0; k < 4; ++k) {
    const std::array<int, 2> pos{k % 2, k / 2};
    switch (colors[k]) {
      case CfaColor::kRed: offsets[kChannelR] = pos; break;
      case CfaColor::kBlue: offsets[kChannelB] = pos; break;
      case CfaColor::kGreen:
        offsets[first_green ? kChannelG1 : kChannelG2] = pos;
        first_green = false;
        break;
    }
  }
  return offsets;
}

void SensorMeta::validate() const {
  if (bit_depth < 8 || bit_depth > 16) {
    throw InvalidArgument("bit_depth must be in [8, 16], got " + std::to_string(bit_depth));
  }
  if (black_level < 0 || black_level >= white_level || white_level > max_code()) {
    throw InvalidArgument("sensor levels must satisfy 0 <= black_level < white_level <= 2^bit_depth - 1 (black " +
                          std::to_string(black_level) + ", white " + std::to_string(white_level) + ", bit depth " +
                          std::to_string(bit_depth) + ")");
  }
}

void MosaicImage::validate() const {
  meta.validate();
  if (width <= 0 || height <= 0 || width % 2 != 0 || height % 2 != 0) {
    throw InvalidArgument("mosaic dimensions must be positive and even, got " + std::to_string(width) + "x" +
                          std::to_string(height));
  }
  if (data.size() != std::size_t(width) * height) throw InvalidArgument("mosaic buffer size mismatch");
  const int max_code = meta.max_code();
  for (std::uint16_t v : data) {
    if (v > max_code) throw InvalidArgument("mosaic sample " + std::to_string(v) + " exceeds bit depth");
  }
}

Image normalize_mosaic(const MosaicImage& mosaic) {
  mosaic.validate();
  Image out(mosaic.width, mosaic.height, 1);
  const double black = mosaic.meta.black_level;
  const double range = double(mosaic.meta.white_level) - black;
  for (std::size_t i = 0; i < mosaic.data.size(); ++i) {
    out.data[i] = float(std::clamp((double(mosaic.data[i]) - black) / range, 0.0, 1.0));
  }
  return out;
}

Image pack_rggb(const Image& mosaic, CfaPattern cfa) {
  require_mosaic(mosaic, "pack_rggb");
  const auto offsets = tile_offsets(cfa);
  Image out(mosaic.width / 2, mosaic.height / 2, kPackedChannels);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      for (int c = 0; c < kPackedChannels; ++c) {
        out.at(x, y, c) = mosaic.at(2 * x + offsets[c][0], 2 * y + offsets[c][1]);
      }
    }
  }
  return out;
}

Image unpack_rggb(const Image& packed, CfaPattern cfa) {
  require_packed(packed, "unpack_rggb");
  const auto offsets = tile_offsets(cfa);
  Image out(packed.width * 2, packed.height * 2, 1);
  for (int y = 0; y < packed.height; ++y) {
    for (int x = 0; x < packed.width; ++x) {
      for (int c = 0; c < kPackedChannels; ++c) {
        out.at(2 * x + offsets[c][0], 2 * y + offsets[c][1]) = packed.at(x, y, c);
      }
    }
  }
  return out;
}

std::vector<int> patch_positions(int extent, int size, int stride) {
  if (size <= 0 || stride <= 0) throw InvalidArgument("patch size and stride must be positive");
  if (stride > size) throw InvalidArgument("patch stride larger than patch size would leave gaps");
  if (size > extent) {
    throw InvalidArgument("patch size " + std::to_string(size) + " exceeds image extent " + std::to_string(extent));
  }
  std::vector<int> positions;
  int pos = 0;
  for (; pos + size <= extent; pos += stride) positions.push_back(pos);
  if (positions.back() + size < extent) positions.push_back(extent - size);
  return positions;
}

std::vector<PatchAnchor> patch_anchors(int width, int height, int size, int stride) {
  const auto xs = patch_positions(width, size, stride);
  const auto ys = patch_positions(height, size, stride);
  std::vector<PatchAnchor> anchors;
  anchors.reserve(xs.size() * ys.size());
  for (int y : ys) {
    for (int x : xs) anchors.push_back({x, y});
  }
  return anchors;
}

Image crop(const Image& img, int x, int y, int w, int h) {
  if (x < 0 || y < 0 || w < 0 || h < 0 || x + w > img.width || y + h > img.height) {
    throw InvalidArgument("crop window outside the image");
  }
  Image out(w, h, img.channels);
  const std::size_t row = std::size_t(w) * img.channels;
  for (int r = 0; r < h; ++r) {
    const float* src = img.data.data() + img.index(x, y + r);
    std::copy(src, src + row, out.data.data() + r * row);
  }
  return out;
}

std::vector<Image> extract_patches(const Image& img, int size, int stride) {
  std::vector<Image> patches;
  for (const PatchAnchor& a : patch_anchors(img.width, img.height, size, stride)) {
    patches.push_back(crop(img, a.x, a.y, size, size));
  }
  return patches;
}

}  // namespace rawforge
