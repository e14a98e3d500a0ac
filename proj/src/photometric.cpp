#include "rawforge/photometric.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rawforge/error.hpp"

namespace rawforge {

Image exposure_scale(const Image& img, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw InvalidArgument("exposure factor must be positive");
  Image out = img;
  for (float& v : out.data) v = float(std::clamp(double(v) * factor, 0.0, 1.0));
  return out;
}

std::string_view to_string(ResampleFilter filter) {
  return filter == ResampleFilter::kBox ? "box" : "bicubic";
}

ResampleFilter parse_filter(std::string_view name) {
  if (name == "box") return ResampleFilter::kBox;
  if (name == "bicubic") return ResampleFilter::kBicubic;
  throw InvalidArgument("unknown resampling filter '" + std::string(name) + "'");
}

double catmull_rom(double t) {
  t = std::abs(t);
  if (t < 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
  if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
  return 0.0;
}

namespace {

// Sparse 1D resampling matrix: output o reads inputs first[o] .. first[o] + taps - 1
// (edge-replicated) with weights[o * taps + j].
struct AxisWeights {
  int out_size = 0;
  int taps = 0;
  std::vector<int> first;
  std::vector<double> weights;
};

AxisWeights downsample_weights(int in_size, int scale) {
  AxisWeights a;
  a.out_size = in_size / scale;
  a.taps = 4 * scale + 1;
  a.first.resize(a.out_size);
  a.weights.resize(std::size_t(a.out_size) * a.taps);
  for (int o = 0; o < a.out_size; ++o) {
    const double center = (o + 0.5) * scale - 0.5;
    const int first = int(std::ceil(center - 2.0 * scale));
    a.first[o] = first;
    double total = 0.0;
    for (int j = 0; j < a.taps; ++j) {
      const double w = catmull_rom((first + j - center) / scale);
      a.weights[std::size_t(o) * a.taps + j] = w;
      total += w;
    }
    for (int j = 0; j < a.taps; ++j) a.weights[std::size_t(o) * a.taps + j] /= total;
  }
  return a;
}

AxisWeights upsample_weights(int in_size, int scale) {
  AxisWeights a;
  a.out_size = in_size * scale;
  a.taps = 4;
  a.first.resize(a.out_size);
  a.weights.resize(std::size_t(a.out_size) * a.taps);
  for (int o = 0; o < a.out_size; ++o) {
    const double center = (o + 0.5) / scale - 0.5;
    const int base = int(std::floor(center));
    a.first[o] = base - 1;
    for (int j = 0; j < 4; ++j) a.weights[std::size_t(o) * 4 + j] = catmull_rom(base - 1 + j - center);
  }
  return a;
}

Image resample_separable(const Image& img, const AxisWeights& wx, const AxisWeights& wy) {
  const int ch = img.channels;
  const int w_in = img.width;
  const int h_in = img.height;
  auto clamp_index = [](int i, int n) { return std::clamp(i, 0, n - 1); };

  std::vector<double> tmp(std::size_t(wx.out_size) * h_in * ch);
  for (int y = 0; y < h_in; ++y) {
    for (int o = 0; o < wx.out_size; ++o) {
      double* dst = tmp.data() + (std::size_t(y) * wx.out_size + o) * ch;
      for (int c = 0; c < ch; ++c) dst[c] = 0.0;
      for (int j = 0; j < wx.taps; ++j) {
        const double w = wx.weights[std::size_t(o) * wx.taps + j];
        const float* src = img.data.data() + img.index(clamp_index(wx.first[o] + j, w_in), y);
        for (int c = 0; c < ch; ++c) dst[c] += w * src[c];
      }
    }
  }

  Image out(wx.out_size, wy.out_size, ch);
  std::vector<double> acc(std::size_t(wx.out_size) * ch);
  for (int o = 0; o < wy.out_size; ++o) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int j = 0; j < wy.taps; ++j) {
      const double w = wy.weights[std::size_t(o) * wy.taps + j];
      const double* src = tmp.data() + std::size_t(clamp_index(wy.first[o] + j, h_in)) * wx.out_size * ch;
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * src[i];
    }
    float* dst = out.data.data() + out.index(0, o);
    for (std::size_t i = 0; i < acc.size(); ++i) dst[i] = float(std::clamp(acc[i], 0.0, 1.0));
  }
  return out;
}

Image box_downsample(const Image& img, int scale) {
  Image out(img.width / scale, img.height / scale, img.channels);
  const double area = double(scale) * scale;
  std::vector<double> acc(img.channels);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int dy = 0; dy < scale; ++dy) {
        for (int dx = 0; dx < scale; ++dx) {
          const float* src = img.data.data() + img.index(x * scale + dx, y * scale + dy);
          for (int c = 0; c < img.channels; ++c) acc[c] += src[c];
        }
      }
      for (int c = 0; c < img.channels; ++c) out.at(x, y, c) = float(acc[c] / area);
    }
  }
  return out;
}

}  // namespace

Image downsample(const Image& img, int scale, ResampleFilter filter) {
  if (scale < 1) throw InvalidArgument("downsampling scale must be at least 1");
  if (img.width % scale != 0 || img.height % scale != 0) {
    throw InvalidArgument("image " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                          " is not divisible by scale " + std::to_string(scale));
  }
  if (scale == 1) return img;
  if (filter == ResampleFilter::kBox) return box_downsample(img, scale);
  return resample_separable(img, downsample_weights(img.width, scale), downsample_weights(img.height, scale));
}

Image upsample_bicubic(const Image& img, int scale) {
  if (scale < 1) throw InvalidArgument("upsampling scale must be at least 1");
  if (scale == 1) {
    Image out = img;
    clamp_unit(out);
    return out;
  }
  return resample_separable(img, upsample_weights(img.width, scale), upsample_weights(img.height, scale));
}

}  // namespace rawforge
