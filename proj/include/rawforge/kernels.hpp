#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rawforge/image.hpp"

namespace rawforge {

// Square, odd-sized, nonnegative blur kernel summing to one.
struct Kernel {
  int size = 1;
  std::vector<double> weights{1.0};

  int radius() const { return size / 2; }
  double at(int x, int y) const { return weights[std::size_t(y) * size + x]; }
  double sum() const;

  // Throws InvalidArgument on even size, negative weights or |sum - 1| > 1e-6.
  void validate() const;

  static Kernel delta(int size = 1);

  friend bool operator==(const Kernel&, const Kernel&) = default;
};

enum class KernelKind { kIsoGaussian, kAnisoGaussian, kDisk, kMotion, kMeasuredPsf };

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

// Parameters of one kernel draw. Only the fields of `kind` are used:
//   iso_gaussian    sigma_x (sigma_y mirrors it)
//   aniso_gaussian  sigma_x, sigma_y, theta
//   disk            radius
//   motion          length, angle
//   measured_psf    psf_path
// size == 0 selects the default size for the kind.
struct KernelSpec {
  KernelKind kind = KernelKind::kIsoGaussian;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double theta = 0.0;
  double radius = 1.0;
  double length = 1.0;
  double angle = 0.0;
  std::string psf_path;
  int size = 0;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

inline constexpr int kMaxDefaultKernelSize = 21;

// 2*ceil(3*sigma)+1, capped at 21.
int default_gaussian_size(double sigma_max);
int default_disk_size(double radius);
// Smallest odd size whose center row holds a centered segment of `length`.
int default_motion_size(double length);

// Rotated bivariate Gaussian sampled at integer offsets, then normalized.
// theta rotates the sigma_x axis from +x towards +y (image rows).
Kernel gaussian_kernel(double sigma_x, double sigma_y, double theta, int size);

// Uniform disk with boundary coverage from 4x4 subsamples per pixel.
Kernel disk_kernel(double radius, int size);

// Line segment of `length` centered on the kernel; each pixel weighs the
// exact length of segment inside its unit cell.
Kernel motion_kernel(double length, double angle, int size);

Kernel make_kernel(const KernelSpec& spec);

// ---- PSF1 files: "PSF1", u32 size, size*size f32, little-endian ----------

struct PsfGrid {
  int size = 0;
  std::vector<float> weights;
  friend bool operator==(const PsfGrid&, const PsfGrid&) = default;
};

std::vector<std::uint8_t> encode_psf(const PsfGrid& grid);
PsfGrid decode_psf(const std::vector<std::uint8_t>& bytes);
PsfGrid read_psf_grid(const std::filesystem::path& path);
void write_psf_grid(const std::filesystem::path& path, const PsfGrid& grid);

// Reads a PSF1 file, clamps negative weights to zero and renormalizes.
Kernel load_psf(const std::filesystem::path& path);
void save_psf(const std::filesystem::path& path, const Kernel& kernel);

// Full 2D convolution of two kernels, renormalized.
Kernel compose(const Kernel& a, const Kernel& b);

// Per-channel convolution with reflect-101 boundaries, clamped to [0, 1].
// Each output pixel is summed in a fixed tap order.
Image convolve(const Image& img, const Kernel& kernel);

}  // namespace rawforge
