#include "rawforge/image.hpp"

#include <algorithm>
#include <string>

#include "rawforge/error.hpp"

namespace rawforge {

Image::Image(int w, int h, int c, float fill)
    : width(w), height(h), channels(c), data(std::size_t(w) * h * c, fill) {
  if (w < 0 || h < 0 || c < 0) throw InvalidArgument("image dimensions must be nonnegative");
}

std::vector<float> extract_channel(const Image& img, int c) {
  std::vector<float> plane(img.pixel_count());
  const std::size_t stride = img.channels;
  for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = img.data[i * stride + c];
  return plane;
}

void insert_channel(Image& img, int c, std::span<const float> plane) {
  const std::size_t stride = img.channels;
  for (std::size_t i = 0; i < plane.size(); ++i) img.data[i * stride + c] = plane[i];
}

void require_packed(const Image& img, const char* op) {
  if (img.channels != kPackedChannels) {
    throw InvalidArgument(std::string(op) + ": expected a 4-channel packed RAW, got " +
                          std::to_string(img.channels) + " channels");
  }
}

void clamp_unit(Image& img) {
  for (float& v : img.data) v = std::clamp(v, 0.0f, 1.0f);
}

Image to_float(const Rgb8Image& rgb) {
  Image out(rgb.width, rgb.height, 3);
  for (std::size_t i = 0; i < rgb.data.size(); ++i) out.data[i] = float(rgb.data[i]);
  return out;
}

}  // namespace rawforge
