#pragma once

#include <string_view>

#include "rawforge/image.hpp"

namespace rawforge {

// Multiplies every sample by factor (> 0) and clamps to [0, 1].
Image exposure_scale(const Image& img, double factor);

enum class ResampleFilter { kBox, kBicubic };

std::string_view to_string(ResampleFilter filter);
ResampleFilter parse_filter(std::string_view name);

// Catmull-Rom cubic (Keys, a = -0.5).
double catmull_rom(double t);

// Integer-factor reduction of each channel independently.
//   box:     exact scale x scale block mean
//   bicubic: Catmull-Rom stretched by `scale` (antialiased), sample
//            centers at (o + 0.5) * scale - 0.5, edge replication
// Width and height must be divisible by scale.
Image downsample(const Image& img, int scale, ResampleFilter filter);

// Catmull-Rom enlargement by `scale`, sample centers at (o + 0.5) / scale - 0.5,
// edge replication, clamped to [0, 1].
Image upsample_bicubic(const Image& img, int scale);

}  // namespace rawforge
