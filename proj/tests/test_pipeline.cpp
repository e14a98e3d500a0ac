#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "rawforge/error.hpp"
#include "rawforge/pipeline.hpp"
#include "support.hpp"

using namespace rawforge;

namespace {

DegradationConfig degenerate_level_one() {
  DegradationConfig cfg;
  cfg.level = DegradationLevel::kI;
  cfg.scale = 1;
  cfg.kernels = KernelPool{};
  cfg.kernels.weight_aniso_gaussian = cfg.kernels.weight_disk = cfg.kernels.weight_motion = 0.0;
  cfg.kernels.iso_sigma = {1e-6, 1e-6};
  cfg.noise = ProfileRegistry::fixed({"zero", 0.0, 0.0});
  return cfg;
}

std::vector<std::string> stage_names(const DegradationRecord& rec) {
  std::vector<std::string> names;
  for (const Stage& s : rec.stages) names.push_back(s.name);
  return names;
}

double psnr_unit(const Image& a, const Image& b) {
  double se = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) se += std::pow(double(a.data[i]) - b.data[i], 2);
  return 10.0 * std::log10(1.0 / (se / double(a.data.size())));
}

}  // namespace

TEST_CASE("level names") {
  CHECK(parse_level("II") == DegradationLevel::kII);
  CHECK(parse_level("4") == DegradationLevel::kIV);
  CHECK(parse_level("iii") == DegradationLevel::kIII);
  CHECK(to_string(DegradationLevel::kIV) == "IV");
  CHECK_THROWS_AS(parse_level("V"), InvalidArgument);
}

TEST_CASE("degenerate level I pipeline is the identity") {
  const Image img = testing::textured_image(32, 24, 1);
  const auto result = degrade(img, degenerate_level_one(), 0);
  CHECK(result.degraded == img);
  CHECK(stage_names(result.record) == std::vector<std::string>{"blur", "noise"});
}

TEST_CASE("stage lists per level") {
  DegradationConfig cfg;
  cfg.level = DegradationLevel::kI;
  CHECK(stage_names(plan_degradation(64, 64, cfg, 3)) == std::vector<std::string>{"blur", "noise"});
  cfg.level = DegradationLevel::kII;
  CHECK(stage_names(plan_degradation(64, 64, cfg, 3)) == std::vector<std::string>{"blur", "downsample", "noise"});
  cfg.level = DegradationLevel::kIII;
  CHECK(stage_names(plan_degradation(64, 64, cfg, 3)) ==
        std::vector<std::string>{"blur", "exposure", "downsample", "noise"});
  cfg.level = DegradationLevel::kIV;
  cfg.probabilities.second_kernel = 1.0;
  cfg.probabilities.resample = 1.0;
  CHECK(stage_names(plan_degradation(64, 64, cfg, 3)) ==
        std::vector<std::string>{"blur", "exposure", "downsample", "noise", "second_blur", "resample"});
  // Odd LR size: the down-2 round trip is skipped.
  CHECK(stage_names(plan_degradation(66, 64, cfg, 3)).back() == "second_blur");
  const auto rec = plan_degradation(64, 64, cfg, 3);
  CHECK(std::get<BlurStage>(rec.stages[4].op).kernel.kind == KernelKind::kMotion);
}

TEST_CASE("level II shape contract") {
  DegradationConfig cfg;
  cfg.level = DegradationLevel::kII;
  const auto r = degrade(testing::textured_image(496, 496, 2), cfg, 0);
  CHECK(r.degraded.width == 248);
  CHECK(r.degraded.height == 248);
  CHECK(r.degraded.channels == 4);
  cfg.scale = 4;
  CHECK(degrade(testing::textured_image(64, 32, 2), cfg, 0).degraded.width == 16);
}

TEST_CASE("degrade is deterministic and never mutates its input") {
  const Image img = testing::textured_image(64, 48, 3);
  const Image copy = img;
  DegradationConfig cfg;
  cfg.probabilities.second_kernel = 1.0;
  cfg.probabilities.resample = 1.0;
  const auto a = degrade(img, cfg, 12);
  const auto b = degrade(img, cfg, 12);
  CHECK(img == copy);
  CHECK(a.degraded == b.degraded);
  CHECK(a.record.serialize() == b.record.serialize());
  CHECK_FALSE(degrade(img, cfg, 13).degraded == a.degraded);
  cfg.seed = 1;
  CHECK_FALSE(degrade(img, cfg, 12).degraded == a.degraded);
}

TEST_CASE("config validation") {
  DegradationConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.scale = 3;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.scale = 1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.level = DegradationLevel::kI;
  CHECK_NOTHROW(cfg.validate());
  cfg = {};
  cfg.probabilities.resample = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.exposure = {0.5, 0.25};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.exposure = {1.0, 5.0};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.kernels.weight_measured_psf = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.patch_size = 250;
  cfg.patch_stride = 250;
  cfg.scale = 4;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  CHECK_THROWS_AS(degrade(testing::textured_image(31, 30, 1), DegradationConfig{}, 0), InvalidArgument);
}

TEST_CASE("every record replays bit-exactly and survives text round trip (property)") {
  for (std::uint64_t i = 0; i < 24; ++i) {
    DegradationConfig cfg;
    cfg.level = static_cast<DegradationLevel>(1 + i % 4);
    cfg.scale = i % 3 == 0 ? 4 : 2;
    cfg.seed = i * 7919;
    cfg.probabilities.second_kernel = 0.5;
    cfg.probabilities.resample = 0.5;
    cfg.second_kernel = i % 2 ? SecondKernelSource::kPool : SecondKernelSource::kMotion;
    const Image img = testing::textured_image(48, 40, i);
    const auto r = degrade(img, cfg, i);
    CHECK(replay(img, r.record) == r.degraded);
    const std::string text = r.record.serialize();
    const DegradationRecord back = DegradationRecord::parse(text);
    CHECK(back.serialize() == text);
    CHECK(back.digest() == r.record.digest());
    CHECK(replay(img, back) == r.degraded);
  }
}

TEST_CASE("record text form") {
  DegradationRecord rec;
  rec.level = DegradationLevel::kIII;
  rec.stream_seed = 0xabc;
  rec.stages.push_back({"blur", BlurStage{KernelSpec{KernelKind::kIsoGaussian, 0.1, 0.1, 0.0, 0.0, 0.0, 0.0, "", 3}}});
  rec.stages.push_back({"exposure", ExposureStage{0.5}});
  rec.stages.push_back({"noise", NoiseStage{{"cam", 0.001, 1e-05}, 1}});
  const std::string expected =
      "rawforge-record 1\n"
      "level III\n"
      "stream_seed 0000000000000abc\n"
      "stage blur kind=iso_gaussian sigma=0.1 size=3\n"
      "stage exposure op=exposure factor=0.5\n"
      "stage noise op=noise profile=cam lambda_s=0.001 lambda_r=1e-05 seed=0000000000000001\n";
  CHECK(rec.serialize() == expected);
  // FNV-1a 64 of the text above, computed independently.
  CHECK(digest_hex(rec.digest()) == "4202893d8fb5e28e");
  CHECK_THROWS_AS(DegradationRecord::parse("nonsense\n"), FormatError);
  CHECK_THROWS_AS(DegradationRecord::parse("rawforge-record 1\nlevel II\nstage x op=warp\n"), FormatError);
  CHECK_THROWS_AS(DegradationRecord::parse("rawforge-record 1\nlevel II\nstage blur kind=disk size=3\n"), FormatError);
}

TEST_CASE("empty record is the identity") {
  const Image img = testing::textured_image(10, 8, 5);
  CHECK(replay(img, DegradationRecord{}) == img);
}

TEST_CASE("reordering blur and noise changes the output") {
  const Image img = testing::textured_image(64, 64, 6);
  DegradationRecord rec;
  KernelSpec k;
  k.kind = KernelKind::kIsoGaussian;
  k.sigma_x = k.sigma_y = 1.2;
  k.size = default_gaussian_size(1.2);
  rec.stages.push_back({"blur", BlurStage{k}});
  rec.stages.push_back({"noise", NoiseStage{{"p", 0.01, 0.001}, 77}});
  DegradationRecord swapped = rec;
  std::swap(swapped.stages[0], swapped.stages[1]);
  const Image a = replay(img, rec);
  const Image b = replay(img, swapped);
  CHECK(testing::max_abs_diff(a, b) > 0.01);
}

TEST_CASE("level IV without optional stages and with unit exposure equals level II") {
  for (std::uint64_t i = 0; i < 10; ++i) {
    DegradationConfig iv;
    iv.level = DegradationLevel::kIV;
    iv.seed = 5;
    iv.exposure = {1.0, 1.0};
    iv.probabilities.second_kernel = 0.0;
    iv.probabilities.resample = 0.0;
    DegradationConfig ii = iv;
    ii.level = DegradationLevel::kII;
    const Image img = testing::textured_image(40, 32, 100 + i);
    CHECK(degrade(img, iv, i).degraded == degrade(img, ii, i).degraded);
  }
}

TEST_CASE("level IV is on average harder than level II") {
  double sum_ii = 0.0;
  double sum_iv = 0.0;
  const int n = 12;
  for (int i = 0; i < n; ++i) {
    const Image img = testing::textured_image(64, 64, 300 + i);
    DegradationConfig cfg;
    cfg.level = DegradationLevel::kII;
    sum_ii += psnr_unit(img, upsample_bicubic(degrade(img, cfg, i).degraded, 2));
    cfg.level = DegradationLevel::kIV;
    sum_iv += psnr_unit(img, upsample_bicubic(degrade(img, cfg, i).degraded, 2));
  }
  CHECK(sum_iv / n <= sum_ii / n);
}
