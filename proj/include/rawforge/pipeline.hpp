#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rawforge/image.hpp"
#include "rawforge/kernels.hpp"
#include "rawforge/noise.hpp"
#include "rawforge/photometric.hpp"

namespace rawforge {

enum class DegradationLevel { kI = 1, kII = 2, kIII = 3, kIV = 4 };

std::string_view to_string(DegradationLevel level);
DegradationLevel parse_level(std::string_view name);

struct ParamRange {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const ParamRange&, const ParamRange&) = default;
};

// Blur kernel pool: selection weight and parameter ranges per kind.
// Angles are drawn uniformly in [0, pi).
struct KernelPool {
  double weight_iso_gaussian = 1.0;
  double weight_aniso_gaussian = 1.0;
  double weight_disk = 1.0;
  double weight_motion = 1.0;
  double weight_measured_psf = 0.0;

  ParamRange iso_sigma{0.2, 1.5};
  ParamRange aniso_sigma{0.2, 2.0};
  ParamRange disk_radius{0.5, 2.0};
  ParamRange motion_length{1.0, 7.0};
  std::vector<std::string> psf_files;

  void validate() const;
};

enum class SecondKernelSource { kMotion, kPool };

// Application probabilities of the optional stages; only level IV rolls them.
struct StageProbabilities {
  double blur = 1.0;
  double exposure = 1.0;
  double noise = 1.0;
  double second_kernel = 0.3;
  double resample = 0.3;
};

struct DegradationConfig {
  DegradationLevel level = DegradationLevel::kIV;
  int scale = 2;
  ResampleFilter filter = ResampleFilter::kBicubic;
  KernelPool kernels;
  ProfileRegistry noise = ProfileRegistry::defaults();
  ParamRange exposure{0.25, 1.0};
  StageProbabilities probabilities;
  SecondKernelSource second_kernel = SecondKernelSource::kMotion;
  std::uint64_t seed = 0;

  // Dataset synthesis only; patch_size 0 disables patching.
  int patch_size = 248;
  int patch_stride = 248;

  // Throws InvalidArgument on out-of-range probabilities, empty ranges,
  // scale outside {1, 2, 4} or levels II-IV with scale < 2.
  void validate() const;
};

struct BlurStage {
  KernelSpec kernel;
};
struct ExposureStage {
  double factor = 1.0;
};
struct DownsampleStage {
  int scale = 1;
  ResampleFilter filter = ResampleFilter::kBox;
};
struct NoiseStage {
  NoiseProfile profile;
  std::uint64_t seed = 0;
};
// Down by `factor` with `filter`, then bicubic back up to the input size.
struct ResampleStage {
  int factor = 2;
  ResampleFilter filter = ResampleFilter::kBicubic;
};

using StageOp = std::variant<BlurStage, ExposureStage, DownsampleStage, NoiseStage, ResampleStage>;

struct Stage {
  std::string name;
  StageOp op;
};

// Exact list of operations applied by degrade(), in order.
struct DegradationRecord {
  DegradationLevel level = DegradationLevel::kI;
  std::uint64_t stream_seed = 0;
  std::vector<Stage> stages;

  // Line-oriented text; doubles are written in shortest round-trip form.
  std::string serialize() const;
  static DegradationRecord parse(std::string_view text);
  // FNV-1a 64 over serialize().
  std::uint64_t digest() const;
};

std::string digest_hex(std::uint64_t digest);

struct DegradationResult {
  Image degraded;
  DegradationRecord record;
};

// Stage order: blur, exposure (III, IV), downsample (II-IV), shot-read
// noise, then for level IV an optional second kernel and an optional
// down-2/bicubic-up round trip. Every level consumes the random stream of
// (cfg.seed, image_index) in the same order so that lower levels are
// restrictions of level IV.
DegradationResult degrade(const Image& clean, const DegradationConfig& cfg, std::uint64_t image_index);

// Draws the stages without touching pixels; degrade() is plan + replay.
DegradationRecord plan_degradation(int width, int height, const DegradationConfig& cfg,
                                   std::uint64_t image_index);

Image apply_stage(const Image& img, const Stage& stage);
Image replay(const Image& clean, const DegradationRecord& record);

}  // namespace rawforge
