#include "rawforge/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "rawforge/error.hpp"
#include "rawforge/io.hpp"

namespace rawforge {

double Kernel::sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void Kernel::validate() const {
  if (size < 1 || size % 2 == 0) throw InvalidArgument("kernel size must be odd and positive, got " + std::to_string(size));
  if (weights.size() != std::size_t(size) * size) throw InvalidArgument("kernel weight count does not match its size");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("kernel weights must be finite and nonnegative");
  }
  if (std::abs(sum() - 1.0) > 1e-6) throw InvalidArgument("kernel weights must sum to 1");
}

Kernel Kernel::delta(int size) {
  if (size < 1 || size % 2 == 0) throw InvalidArgument("kernel size must be odd and positive");
  Kernel k;
  k.size = size;
  k.weights.assign(std::size_t(size) * size, 0.0);
  k.weights[std::size_t(size / 2) * size + size / 2] = 1.0;
  return k;
}

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::kIsoGaussian: return "iso_gaussian";
    case KernelKind::kAnisoGaussian: return "aniso_gaussian";
    case KernelKind::kDisk: return "disk";
    case KernelKind::kMotion: return "motion";
    case KernelKind::kMeasuredPsf: return "measured_psf";
  }
  return "?";
}

KernelKind parse_kernel_kind(std::string_view name) {
  for (KernelKind k : {KernelKind::kIsoGaussian, KernelKind::kAnisoGaussian, KernelKind::kDisk, KernelKind::kMotion,
                       KernelKind::kMeasuredPsf}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown kernel kind '" + std::string(name) + "'");
}

namespace {

void require_odd_size(int size) {
  if (size < 1 || size % 2 == 0) throw InvalidArgument("kernel size must be odd and positive, got " + std::to_string(size));
}

void normalize(Kernel& k) {
  const double s = k.sum();
  if (!(s > 0.0)) throw InvalidArgument("kernel has no mass");
  for (double& w : k.weights) w /= s;
}

}  // namespace

int default_gaussian_size(double sigma_max) {
  return std::min(2 * int(std::ceil(3.0 * sigma_max)) + 1, kMaxDefaultKernelSize);
}

int default_disk_size(double radius) { return 2 * int(std::ceil(radius)) + 1; }

int default_motion_size(double length) { return 2 * int(std::ceil(std::max(length / 2.0 - 0.5, 0.0))) + 1; }

Kernel gaussian_kernel(double sigma_x, double sigma_y, double theta, int size) {
  if (!(sigma_x > 0.0) || !(sigma_y > 0.0)) throw InvalidArgument("gaussian sigmas must be positive");
  require_odd_size(size);
  Kernel k;
  k.size = size;
  k.weights.resize(std::size_t(size) * size);
  const int r = size / 2;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      const double u = c * x + s * y;
      const double v = -s * x + c * y;
      const double e = 0.5 * (u * u / (sigma_x * sigma_x) + v * v / (sigma_y * sigma_y));
      k.weights[std::size_t(y + r) * size + (x + r)] = std::exp(-e);
    }
  }
  normalize(k);
  return k;
}

Kernel disk_kernel(double radius, int size) {
  if (!(radius > 0.0)) throw InvalidArgument("disk radius must be positive");
  require_odd_size(size);
  constexpr int kSub = 4;
  Kernel k;
  k.size = size;
  k.weights.resize(std::size_t(size) * size);
  const int r = size / 2;
  const double r2 = radius * radius;
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      int inside = 0;
      for (int j = 0; j < kSub; ++j) {
        const double py = y + (j + 0.5) / kSub - 0.5;
        for (int i = 0; i < kSub; ++i) {
          const double px = x + (i + 0.5) / kSub - 0.5;
          if (px * px + py * py <= r2) ++inside;
        }
      }
      k.weights[std::size_t(y + r) * size + (x + r)] = double(inside) / (kSub * kSub);
    }
  }
  normalize(k);
  return k;
}

namespace {

// Length of the part of segment p0 + t * d, t in [0, 1], inside the box.
double clipped_length(double x0, double y0, double dx, double dy, double xmin, double xmax, double ymin, double ymax) {
  double t0 = 0.0;
  double t1 = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {x0 - xmin, xmax - x0, y0 - ymin, ymax - y0};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return 0.0;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
  }
  return t1 > t0 ? (t1 - t0) * std::hypot(dx, dy) : 0.0;
}

}  // namespace

Kernel motion_kernel(double length, double angle, int size) {
  if (!(length >= 1.0)) throw InvalidArgument("motion length must be at least 1");
  require_odd_size(size);
  Kernel k;
  k.size = size;
  k.weights.resize(std::size_t(size) * size);
  const int r = size / 2;
  const double dx = length * std::cos(angle);
  const double dy = length * std::sin(angle);
  const double x0 = -dx / 2.0;
  const double y0 = -dy / 2.0;
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      k.weights[std::size_t(y + r) * size + (x + r)] =
          clipped_length(x0, y0, dx, dy, x - 0.5, x + 0.5, y - 0.5, y + 0.5);
    }
  }
  normalize(k);
  return k;
}

Kernel make_kernel(const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelKind::kIsoGaussian:
      return gaussian_kernel(spec.sigma_x, spec.sigma_x, 0.0,
                             spec.size ? spec.size : default_gaussian_size(spec.sigma_x));
    case KernelKind::kAnisoGaussian:
      return gaussian_kernel(spec.sigma_x, spec.sigma_y, spec.theta,
                             spec.size ? spec.size : default_gaussian_size(std::max(spec.sigma_x, spec.sigma_y)));
    case KernelKind::kDisk:
      return disk_kernel(spec.radius, spec.size ? spec.size : default_disk_size(spec.radius));
    case KernelKind::kMotion:
      return motion_kernel(spec.length, spec.angle, spec.size ? spec.size : default_motion_size(spec.length));
    case KernelKind::kMeasuredPsf:
      return load_psf(spec.psf_path);
  }
  throw InvalidArgument("unknown kernel kind");
}

// ---- PSF1 ----------------------------------------------------------------------

std::vector<std::uint8_t> encode_psf(const PsfGrid& grid) {
  require_odd_size(grid.size);
  if (grid.weights.size() != std::size_t(grid.size) * grid.size) throw InvalidArgument("PSF weight count mismatch");
  std::vector<std::uint8_t> out{'P', 'S', 'F', '1'};
  put_u32le(out, std::uint32_t(grid.size));
  for (float w : grid.weights) put_f32le(out, w);
  return out;
}

PsfGrid decode_psf(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), "PSF1", 4) != 0) throw FormatError("not a PSF1 file");
  const std::uint32_t size = get_u32le(bytes.data() + 4);
  if (size == 0 || size % 2 == 0 || size > 4095) {
    throw FormatError("PSF size must be odd and in [1, 4095], got " + std::to_string(size));
  }
  const std::size_t count = std::size_t(size) * size;
  if (bytes.size() != 8 + count * 4) throw FormatError("PSF payload size does not match header");
  PsfGrid grid;
  grid.size = int(size);
  grid.weights.resize(count);
  for (std::size_t i = 0; i < count; ++i) grid.weights[i] = get_f32le(bytes.data() + 8 + 4 * i);
  return grid;
}

PsfGrid read_psf_grid(const std::filesystem::path& path) {
  try {
    return decode_psf(read_file_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_psf_grid(const std::filesystem::path& path, const PsfGrid& grid) { write_file_bytes(path, encode_psf(grid)); }

Kernel load_psf(const std::filesystem::path& path) {
  const PsfGrid grid = read_psf_grid(path);
  Kernel k;
  k.size = grid.size;
  k.weights.resize(grid.weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < grid.weights.size(); ++i) {
    const float w = grid.weights[i];
    if (!std::isfinite(w)) throw FormatError(path.string() + ": PSF contains non-finite weights");
    k.weights[i] = std::max(double(w), 0.0);
    total += k.weights[i];
  }
  if (!(total > 0.0)) throw FormatError(path.string() + ": PSF has no positive weight");
  for (double& w : k.weights) w /= total;
  return k;
}

void save_psf(const std::filesystem::path& path, const Kernel& kernel) {
  PsfGrid grid;
  grid.size = kernel.size;
  grid.weights.assign(kernel.weights.begin(), kernel.weights.end());
  write_psf_grid(path, grid);
}

Kernel compose(const Kernel& a, const Kernel& b) {
  Kernel k;
  k.size = a.size + b.size - 1;
  k.weights.assign(std::size_t(k.size) * k.size, 0.0);
  for (int ay = 0; ay < a.size; ++ay) {
    for (int ax = 0; ax < a.size; ++ax) {
      const double wa = a.at(ax, ay);
      if (wa == 0.0) continue;
      for (int by = 0; by < b.size; ++by) {
        for (int bx = 0; bx < b.size; ++bx) {
          k.weights[std::size_t(ay + by) * k.size + (ax + bx)] += wa * b.at(bx, by);
        }
      }
    }
  }
  normalize(k);
  return k;
}

// ---- convolution ------------------------------------------------------------

namespace {

int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

struct Tap {
  int dx;
  int dy;
  float w;
};

}  // namespace

Image convolve(const Image& img, const Kernel& kernel) {
  kernel.validate();
  const int r = kernel.radius();
  const int w = img.width;
  const int h = img.height;
  const int pw = w + 2 * r;
  const int ph = h + 2 * r;

  // out(x, y) = sum k(kx, ky) * in(x + r - kx, y + r - ky), i.e. padded(x + 2r - kx, y + 2r - ky).
  std::vector<Tap> taps;
  for (int ky = 0; ky < kernel.size; ++ky) {
    for (int kx = 0; kx < kernel.size; ++kx) {
      const double wk = kernel.at(kx, ky);
      if (wk != 0.0) taps.push_back({2 * r - kx, 2 * r - ky, float(wk)});
    }
  }

  std::vector<int> col_src(pw);
  for (int px = 0; px < pw; ++px) col_src[px] = reflect101(px - r, w);

  Image out(w, h, img.channels);
  std::vector<float> padded(std::size_t(pw) * ph);
  std::vector<float> acc(w);
  for (int c = 0; c < img.channels; ++c) {
    for (int py = 0; py < ph; ++py) {
      const int sy = reflect101(py - r, h);
      const float* src = img.data.data() + img.index(0, sy, c);
      float* dst = padded.data() + std::size_t(py) * pw;
      for (int px = 0; px < pw; ++px) dst[px] = src[std::size_t(col_src[px]) * img.channels];
    }
    for (int y = 0; y < h; ++y) {
      std::fill(acc.begin(), acc.end(), 0.0f);
      for (const Tap& t : taps) {
        const float* row = padded.data() + std::size_t(y + t.dy) * pw + t.dx;
        const float wt = t.w;
        for (int x = 0; x < w; ++x) acc[x] += wt * row[x];
      }
      float* dst = out.data.data() + out.index(0, y, c);
      for (int x = 0; x < w; ++x) dst[std::size_t(x) * img.channels] = std::clamp(acc[x], 0.0f, 1.0f);
    }
  }
  return out;
}

}  // namespace rawforge
