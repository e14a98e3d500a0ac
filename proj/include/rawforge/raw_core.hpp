#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rawforge/image.hpp"

namespace rawforge {

enum class CfaPattern { kRggb, kBggr, kGrbg, kGbrg };

enum class CfaColor { kRed, kGreen, kBlue };

std::string_view to_string(CfaPattern cfa);
CfaPattern parse_cfa(std::string_view name);

// Color sensed at mosaic position (x, y).
CfaColor cfa_color(CfaPattern cfa, int x, int y);

// Offset (dx, dy) inside the 2x2 tile of the R, G1, G2 and B samples.
// G1 is the first green of the tile in raster order.
std::array<std::array<int, 2>, 4> tile_offsets(CfaPattern cfa);

struct SensorMeta {
  int black_level = 0;
  int white_level = 65535;
  int bit_depth = 16;
  CfaPattern cfa = CfaPattern::kRggb;

  int max_code() const { return (1 << bit_depth) - 1; }
  // Throws InvalidArgument unless 8 <= bit_depth <= 16 and
  // 0 <= black_level < white_level <= 2^bit_depth - 1.
  void validate() const;

  friend bool operator==(const SensorMeta&, const SensorMeta&) = default;
};

// Single-channel sensor readout in digital numbers.
struct MosaicImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> data;
  SensorMeta meta;

  std::uint16_t at(int x, int y) const { return data[std::size_t(y) * width + x]; }
  std::uint16_t& at(int x, int y) { return data[std::size_t(y) * width + x]; }

  // Checks the metadata, even dimensions and that every sample fits in bit_depth.
  void validate() const;

  friend bool operator==(const MosaicImage&, const MosaicImage&) = default;
};

// (v - black) / (white - black), clamped to [0, 1]. One output channel.
Image normalize_mosaic(const MosaicImage& mosaic);

// Mosaic (1 channel, even dimensions) -> half-resolution R, G1, G2, B image.
Image pack_rggb(const Image& mosaic, CfaPattern cfa);

// Inverse of pack_rggb.
Image unpack_rggb(const Image& packed, CfaPattern cfa);

struct PatchAnchor {
  int x = 0;
  int y = 0;
  friend bool operator==(const PatchAnchor&, const PatchAnchor&) = default;
};

inline constexpr int kDefaultPatchSize = 248;

// Anchors along one axis: 0, stride, 2*stride, ... plus a final anchor at
// extent - size when the regular grid leaves pixels uncovered.
std::vector<int> patch_positions(int extent, int size, int stride);

std::vector<PatchAnchor> patch_anchors(int width, int height, int size, int stride);

Image crop(const Image& img, int x, int y, int w, int h);

std::vector<Image> extract_patches(const Image& img, int size = kDefaultPatchSize,
                                   int stride = kDefaultPatchSize);

}  // namespace rawforge
