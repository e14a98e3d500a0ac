#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "rawforge/io.hpp"
#include "rawforge/isp.hpp"
#include "rawforge/noise.hpp"
#include "rawforge/pipeline.hpp"

namespace rawforge {

// One text file configures every subcommand:
//
//   [pipeline]  level, scale, filter, seed, exposure_min, exposure_max,
//               p_blur, p_exposure, p_noise, p_second_kernel, p_resample,
//               second_kernel (motion|pool), patch_size, patch_stride,
//               noise_registry (path of a separate registry file)
//   [kernels]   weight_<kind>, iso_sigma_min/max, aniso_sigma_min/max,
//               disk_radius_min/max, motion_length_min/max, psf_files
//   [profile]   name, lambda_s_min/max, lambda_r_min/max  (repeatable)
//   [isp]       wb_r, wb_g, wb_b, ccm (9 numbers), gamma, tonemap
//
// Unknown sections and keys are rejected. Relative paths resolve against
// the directory of the file.
struct RunConfig {
  DegradationConfig degradation;
  IspParams isp;
};

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Registry file made of [profile] sections.
ProfileRegistry parse_registry(std::string_view text);
ProfileRegistry load_registry(const std::filesystem::path& path);
std::string format_registry(const ProfileRegistry& registry);

}  // namespace rawforge
