#include "rawforge/metrics.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "rawforge/error.hpp"

namespace rawforge {

double psnr(std::span<const float> a, std::span<const float> b, double peak) {
  if (a.size() != b.size()) throw InvalidArgument("psnr: inputs differ in size");
  if (a.empty()) throw InvalidArgument("psnr: empty input");
  if (!(peak > 0.0)) throw InvalidArgument("psnr: peak must be positive");
  double sse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = double(a[i]) - double(b[i]);
    sse += d * d;
  }
  const double mse = sse / double(a.size());
  if (mse == 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(peak * peak / mse);
}

double psnr(const Image& a, const Image& b, double peak) {
  if (!a.same_shape(b)) throw InvalidArgument("psnr: image shapes differ");
  return psnr(std::span<const float>(a.data), std::span<const float>(b.data), peak);
}

double psnr(const Rgb8Image& a, const Rgb8Image& b, double peak) {
  if (a.width != b.width || a.height != b.height) throw InvalidArgument("psnr: image shapes differ");
  const Image fa = to_float(a);
  const Image fb = to_float(b);
  return psnr(std::span<const float>(fa.data), std::span<const float>(fb.data), peak);
}

namespace {

std::array<double, kSsimWindow> ssim_window() {
  std::array<double, kSsimWindow> w{};
  double total = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - kSsimWindow / 2;
    w[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

// Separable Gaussian filtering restricted to positions where the whole window fits.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h) {
  static const auto window = ssim_window();
  const int ow = w - kSsimWindow + 1;
  const int oh = h - kSsimWindow + 1;
  std::vector<double> tmp(std::size_t(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) s += window[k] * src[std::size_t(y) * w + x + k];
      tmp[std::size_t(y) * ow + x] = s;
    }
  }
  std::vector<double> out(std::size_t(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) s += window[k] * tmp[std::size_t(y + k) * ow + x];
      out[std::size_t(y) * ow + x] = s;
    }
  }
  return out;
}

double ssim_plane(const std::vector<double>& a, const std::vector<double>& b, int w, int h, double data_range) {
  const double c1 = (kSsimK1 * data_range) * (kSsimK1 * data_range);
  const double c2 = (kSsimK2 * data_range) * (kSsimK2 * data_range);
  std::vector<double> aa(a.size());
  std::vector<double> bb(a.size());
  std::vector<double> ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = filter_valid(a, w, h);
  const auto mu_b = filter_valid(b, w, h);
  const auto e_aa = filter_valid(aa, w, h);
  const auto e_bb = filter_valid(bb, w, h);
  const auto e_ab = filter_valid(ab, w, h);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
    const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
    const double cov = e_ab[i] - mu_a[i] * mu_b[i];
    const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
    const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (var_a + var_b + c2);
    total += num / den;
  }
  return total / double(mu_a.size());
}

}  // namespace

double ssim(const Image& a, const Image& b, double data_range) {
  if (!a.same_shape(b)) throw InvalidArgument("ssim: image shapes differ");
  if (a.width < kSsimWindow || a.height < kSsimWindow) {
    throw InvalidArgument("ssim: images must be at least 11x11");
  }
  if (!(data_range > 0.0)) throw InvalidArgument("ssim: data range must be positive");
  if (a == b) return 1.0;
  double total = 0.0;
  std::vector<double> pa(a.pixel_count());
  std::vector<double> pb(a.pixel_count());
  for (int c = 0; c < a.channels; ++c) {
    for (std::size_t i = 0; i < pa.size(); ++i) {
      pa[i] = a.data[i * a.channels + c];
      pb[i] = b.data[i * b.channels + c];
    }
    total += ssim_plane(pa, pb, a.width, a.height, data_range);
  }
  return total / a.channels;
}

double ssim(const Rgb8Image& a, const Rgb8Image& b) { return ssim(to_float(a), to_float(b), 255.0); }

EvaluationReport evaluate_pair(const Image& clean, const Image& restored, const IspParams& isp) {
  require_packed(clean, "evaluate_pair");
  require_packed(restored, "evaluate_pair");
  if (!clean.same_shape(restored)) {
    throw InvalidArgument("evaluate_pair: clean is " + std::to_string(clean.width) + "x" +
                          std::to_string(clean.height) + " but restored is " + std::to_string(restored.width) + "x" +
                          std::to_string(restored.height));
  }
  EvaluationReport r;
  r.psnr_raw = psnr(clean, restored, 1.0);
  r.ssim_raw = ssim(clean, restored, 1.0);
  const Rgb8Image rgb_clean = render_rgb(clean, isp);
  const Rgb8Image rgb_restored = render_rgb(restored, isp);
  r.psnr_rgb = psnr(rgb_clean, rgb_restored, 255.0);
  r.ssim_rgb = ssim(rgb_clean, rgb_restored);
  return r;
}

}  // namespace rawforge
