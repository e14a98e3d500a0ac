#include <cmath>

#include "doctest.h"
#include "rawforge/error.hpp"
#include "rawforge/photometric.hpp"
#include "support.hpp"

using namespace rawforge;

namespace {

Image permute(const Image& img, const int (&order)[4]) {
  Image out = img;
  for (std::size_t p = 0; p < img.pixel_count(); ++p)
    for (int c = 0; c < 4; ++c) out.data[p * 4 + c] = img.data[p * 4 + order[c]];
  return out;
}

bool per_channel_constant(const Image& img) {
  for (std::size_t p = 1; p < img.pixel_count(); ++p)
    for (int c = 0; c < img.channels; ++c)
      if (img.data[p * img.channels + c] != img.data[std::size_t(c)]) return false;
  return true;
}

}  // namespace

TEST_CASE("exposure scaling") {
  const float c8[4] = {0.8f, 0.8f, 0.8f, 0.8f};
  const Image img = testing::constant_image(4, 4, c8);
  CHECK(exposure_scale(img, 1.0) == img);
  for (float v : exposure_scale(img, 0.5).data) CHECK(v == 0.4f);
  for (float v : exposure_scale(img, 2.0).data) CHECK(v == 1.0f);
  CHECK_THROWS_AS(exposure_scale(img, 0.0), InvalidArgument);
  CHECK_THROWS_AS(exposure_scale(img, -1.0), InvalidArgument);
}

TEST_CASE("catmull-rom kernel") {
  CHECK(catmull_rom(0.0) == 1.0);
  CHECK(catmull_rom(1.0) == 0.0);
  CHECK(catmull_rom(2.0) == 0.0);
  CHECK(catmull_rom(0.5) == doctest::Approx(0.5625));
  CHECK(catmull_rom(1.5) == doctest::Approx(-0.0625));
  CHECK(catmull_rom(-0.5) == catmull_rom(0.5));
}

TEST_CASE("scale 1 is the identity") {
  const Image img = testing::random_image(6, 4, 4, 1);
  CHECK(downsample(img, 1, ResampleFilter::kBox) == img);
  CHECK(downsample(img, 1, ResampleFilter::kBicubic) == img);
  CHECK(upsample_bicubic(img, 1) == img);
}

TEST_CASE("box block mean") {
  Image img(2, 2, 4);
  const float v[4] = {0.1f, 0.3f, 0.5f, 0.7f};
  for (int p = 0; p < 4; ++p) img.data[std::size_t(p) * 4] = v[p];
  const Image out = downsample(img, 2, ResampleFilter::kBox);
  REQUIRE(out.width == 1);
  CHECK(out.data[0] == doctest::Approx(0.4).epsilon(1e-7));
}

TEST_CASE("non-divisible dimensions are rejected") {
  CHECK_THROWS_AS(downsample(Image(6, 5, 4), 2, ResampleFilter::kBox), InvalidArgument);
  CHECK_THROWS_AS(downsample(Image(6, 8, 4), 4, ResampleFilter::kBicubic), InvalidArgument);
}

TEST_CASE("per-channel constants survive every photometric op exactly") {
  const float c[4] = {0.11f, 0.52f, 0.49f, 0.87f};
  const Image img = testing::constant_image(16, 12, c);
  for (int s : {2, 4}) {
    for (ResampleFilter f : {ResampleFilter::kBox, ResampleFilter::kBicubic}) {
      const Image d = downsample(img, s, f);
      CHECK(d.width == 16 / s);
      CHECK(per_channel_constant(d));
      for (int ch = 0; ch < 4; ++ch) CHECK(d.data[std::size_t(ch)] == doctest::Approx(c[ch]).epsilon(1e-6));
    }
    const Image u = upsample_bicubic(img, s);
    CHECK(u.width == 16 * s);
    CHECK(per_channel_constant(u));
    for (int ch = 0; ch < 4; ++ch) CHECK(u.data[std::size_t(ch)] == doctest::Approx(c[ch]).epsilon(1e-6));
  }
  CHECK(per_channel_constant(exposure_scale(img, 0.37)));
}

TEST_CASE("box down then bicubic up restores a constant image") {
  const float c[4] = {0.25f, 0.5f, 0.75f, 1.0f};
  const Image img = testing::constant_image(8, 8, c);
  CHECK(upsample_bicubic(downsample(img, 2, ResampleFilter::kBox), 2) == img);
}

TEST_CASE("ops commute with channel permutation") {
  const Image img = testing::random_image(16, 8, 4, 9);
  const int order[4] = {3, 1, 0, 2};
  CHECK(permute(downsample(img, 2, ResampleFilter::kBicubic), order) == downsample(permute(img, order), 2, ResampleFilter::kBicubic));
  CHECK(permute(downsample(img, 4, ResampleFilter::kBox), order) == downsample(permute(img, order), 4, ResampleFilter::kBox));
  CHECK(permute(upsample_bicubic(img, 2), order) == upsample_bicubic(permute(img, order), 2));
  CHECK(permute(exposure_scale(img, 1.7), order) == exposure_scale(permute(img, order), 1.7));
}

TEST_CASE("4x4 ramp upsampled by 2 matches a direct 1D-then-1D cubic oracle") {
  // Oracle: for each output row/column evaluate the cubic at (o + 0.5) / 2 - 0.5
  // from the four neighbouring samples, clamping the indices at the border.
  Image img(4, 4, 4);
  double ramp[4][4];
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      ramp[y][x] = 0.1 + 0.05 * x + 0.15 * y;
      img.at(x, y, 0) = float(ramp[y][x]);
    }
  auto cubic = [](double p0, double p1, double p2, double p3, double t) {
    return p1 + 0.5 * t * (p2 - p0 + t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
  };
  auto sample_1d = [&](const double* row, int n, double pos, int stride) {
    const int b = int(std::floor(pos));
    auto at = [&](int i) { return row[std::clamp(i, 0, n - 1) * stride]; };
    return cubic(at(b - 1), at(b), at(b + 1), at(b + 2), pos - b);
  };
  double horiz[4][8];
  for (int y = 0; y < 4; ++y)
    for (int o = 0; o < 8; ++o) horiz[y][o] = sample_1d(&ramp[y][0], 4, (o + 0.5) / 2 - 0.5, 1);
  const Image out = upsample_bicubic(img, 2);
  for (int oy = 0; oy < 8; ++oy)
    for (int ox = 0; ox < 8; ++ox) {
      const double expected = std::clamp(sample_1d(&horiz[0][ox], 4, (oy + 0.5) / 2 - 0.5, 8), 0.0, 1.0);
      CHECK(std::abs(out.at(ox, oy, 0) - expected) < 1e-6);
    }
}

TEST_CASE("bicubic downsample of a linear ramp interior keeps the ramp") {
  Image img(32, 4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 32; ++x)
      for (int c = 0; c < 4; ++c) img.at(x, y, c) = float(0.1 + 0.02 * x);
  const Image d = downsample(img, 2, ResampleFilter::kBicubic);
  // Away from the replicated edge the output equals the ramp at the half-pixel center.
  for (int o = 2; o < 14; ++o) CHECK(d.at(o, 1, 0) == doctest::Approx(0.1 + 0.02 * ((o + 0.5) * 2 - 0.5)).epsilon(1e-6));
}
