#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rawforge {

// Dense float image, channel-last, row-major.
//
// The same type carries a normalized mosaic (1 channel), a packed RAW
// (4 channels, R G1 G2 B) and a linear RGB rendering (3 channels).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c, float fill = 0.0f);

  std::size_t pixel_count() const { return std::size_t(width) * height; }
  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  std::size_t index(int x, int y, int c = 0) const {
    return (std::size_t(y) * width + x) * channels + c;
  }
  float& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }
  float at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }

  bool same_shape(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }

  friend bool operator==(const Image&, const Image&) = default;
};

inline constexpr int kPackedChannels = 4;

enum PackedChannel : int { kChannelR = 0, kChannelG1 = 1, kChannelG2 = 2, kChannelB = 3 };

// 8-bit interleaved RGB, the output of the ISP.
struct Rgb8Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t& at(int x, int y, int c) { return data[(std::size_t(y) * width + x) * 3 + c]; }
  std::uint8_t at(int x, int y, int c) const { return data[(std::size_t(y) * width + x) * 3 + c]; }

  friend bool operator==(const Rgb8Image&, const Rgb8Image&) = default;
};

// Planar copy of one channel.
std::vector<float> extract_channel(const Image& img, int c);
void insert_channel(Image& img, int c, std::span<const float> plane);

// Shape check shared by every op that takes a packed RAW.
void require_packed(const Image& img, const char* op);

void clamp_unit(Image& img);

Image to_float(const Rgb8Image& rgb);

}  // namespace rawforge
