#include "rawforge/pipeline.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>

#include "rawforge/error.hpp"
#include "rawforge/rng.hpp"

namespace rawforge {

std::string_view to_string(DegradationLevel level) {
  switch (level) {
    case DegradationLevel::kI: return "I";
    case DegradationLevel::kII: return "II";
    case DegradationLevel::kIII: return "III";
    case DegradationLevel::kIV: return "IV";
  }
  return "?";
}

DegradationLevel parse_level(std::string_view text) {
  std::string name(text);
  for (char& c : name) c = char(std::toupper(static_cast<unsigned char>(c)));
  if (name == "I" || name == "1") return DegradationLevel::kI;
  if (name == "II" || name == "2") return DegradationLevel::kII;
  if (name == "III" || name == "3") return DegradationLevel::kIII;
  if (name == "IV" || name == "4") return DegradationLevel::kIV;
  throw InvalidArgument("unknown degradation level '" + std::string(text) + "' (expected I, II, III or IV)");
}

namespace {

void check_range(const ParamRange& r, const char* what, bool positive) {
  if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.min > r.max || (positive && !(r.min > 0.0))) {
    throw InvalidArgument(std::string(what) + " range [" + std::to_string(r.min) + ", " + std::to_string(r.max) +
                          "] is invalid");
  }
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(what) + " probability must be in [0, 1]");
}

}  // namespace

void KernelPool::validate() const {
  const double weights[] = {weight_iso_gaussian, weight_aniso_gaussian, weight_disk, weight_motion, weight_measured_psf};
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("kernel selection weights must be nonnegative");
    total += w;
  }
  if (weight_measured_psf > 0.0 && psf_files.empty()) {
    throw InvalidArgument("measured_psf has a positive weight but no psf_files are configured");
  }
  if (!(total > 0.0)) throw InvalidArgument("kernel pool has no positive selection weight");
  check_range(iso_sigma, "iso_sigma", true);
  check_range(aniso_sigma, "aniso_sigma", true);
  check_range(disk_radius, "disk_radius", true);
  check_range(motion_length, "motion_length", true);
  if (motion_length.min < 1.0) throw InvalidArgument("motion_length must be at least 1");
}

void DegradationConfig::validate() const {
  if (scale != 1 && scale != 2 && scale != 4) throw InvalidArgument("scale must be 1, 2 or 4");
  if (level != DegradationLevel::kI && scale < 2) {
    throw InvalidArgument("degradation levels II-IV require scale >= 2");
  }
  kernels.validate();
  noise.validate();
  check_range(exposure, "exposure", true);
  if (exposure.max > 4.0) throw InvalidArgument("exposure factors must lie in (0, 4]");
  check_probability(probabilities.blur, "blur");
  check_probability(probabilities.exposure, "exposure");
  check_probability(probabilities.noise, "noise");
  check_probability(probabilities.second_kernel, "second kernel");
  check_probability(probabilities.resample, "resample");
  if (patch_size < 0 || (patch_size > 0 && (patch_stride <= 0 || patch_stride > patch_size))) {
    throw InvalidArgument("patch_size must be >= 0 and patch_stride in [1, patch_size]");
  }
  if (patch_size > 0 && patch_size % scale != 0) {
    throw InvalidArgument("patch_size must be divisible by scale");
  }
}

namespace {

KernelSpec draw_motion(const KernelPool& pool, Rng& rng) {
  KernelSpec k;
  k.kind = KernelKind::kMotion;
  k.length = rng.uniform(pool.motion_length.min, pool.motion_length.max);
  k.angle = rng.uniform(0.0, std::numbers::pi);
  k.size = default_motion_size(k.length);
  return k;
}

KernelSpec draw_kernel(const KernelPool& pool, Rng& rng) {
  const double weights[] = {pool.weight_iso_gaussian, pool.weight_aniso_gaussian, pool.weight_disk,
                            pool.weight_motion, pool.psf_files.empty() ? 0.0 : pool.weight_measured_psf};
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  int pick = 0;
  for (; pick < 4; ++pick) {
    if (weights[pick] > 0.0 && u < weights[pick]) break;
    u -= weights[pick];
  }
  // Rounding can leave u just past the last bucket; fall back to the last positive weight.
  while (weights[pick] <= 0.0) --pick;

  KernelSpec k;
  switch (pick) {
    case 0:
      k.kind = KernelKind::kIsoGaussian;
      k.sigma_x = k.sigma_y = rng.uniform(pool.iso_sigma.min, pool.iso_sigma.max);
      k.size = default_gaussian_size(k.sigma_x);
      break;
    case 1:
      k.kind = KernelKind::kAnisoGaussian;
      k.sigma_x = rng.uniform(pool.aniso_sigma.min, pool.aniso_sigma.max);
      k.sigma_y = rng.uniform(pool.aniso_sigma.min, pool.aniso_sigma.max);
      k.theta = rng.uniform(0.0, std::numbers::pi);
      k.size = default_gaussian_size(std::max(k.sigma_x, k.sigma_y));
      break;
    case 2:
      k.kind = KernelKind::kDisk;
      k.radius = rng.uniform(pool.disk_radius.min, pool.disk_radius.max);
      k.size = default_disk_size(k.radius);
      break;
    case 3:
      k = draw_motion(pool, rng);
      break;
    default:
      k.kind = KernelKind::kMeasuredPsf;
      k.psf_path = pool.psf_files[rng.index(pool.psf_files.size())];
      break;
  }
  return k;
}

}  // namespace

DegradationRecord plan_degradation(int width, int height, const DegradationConfig& cfg, std::uint64_t image_index) {
  cfg.validate();
  const DegradationLevel level = cfg.level;
  const bool downsamples = level != DegradationLevel::kI;
  if (downsamples && (width % cfg.scale != 0 || height % cfg.scale != 0)) {
    throw InvalidArgument("image " + std::to_string(width) + "x" + std::to_string(height) +
                          " is not divisible by scale " + std::to_string(cfg.scale));
  }

  DegradationRecord rec;
  rec.level = level;
  rec.stream_seed = derive_seed(cfg.seed, image_index);
  Rng rng(rec.stream_seed);

  // Every level draws the same sequence; lower levels ignore what they do not use.
  const KernelSpec primary = draw_kernel(cfg.kernels, rng);
  const double exposure = rng.uniform(cfg.exposure.min, cfg.exposure.max);
  const NoiseProfile profile = draw_profile(cfg.noise, rng);
  const std::uint64_t noise_seed = rng.next();
  const bool roll_blur = rng.bernoulli(cfg.probabilities.blur);
  const bool roll_exposure = rng.bernoulli(cfg.probabilities.exposure);
  const bool roll_noise = rng.bernoulli(cfg.probabilities.noise);
  const bool roll_second = rng.bernoulli(cfg.probabilities.second_kernel);
  const bool roll_resample = rng.bernoulli(cfg.probabilities.resample);
  const KernelSpec secondary =
      cfg.second_kernel == SecondKernelSource::kMotion ? draw_motion(cfg.kernels, rng) : draw_kernel(cfg.kernels, rng);

  const bool full = level == DegradationLevel::kIV;
  if (!full || roll_blur) rec.stages.push_back({"blur", BlurStage{primary}});
  if (level == DegradationLevel::kIII || (full && roll_exposure)) {
    rec.stages.push_back({"exposure", ExposureStage{exposure}});
  }
  if (downsamples) rec.stages.push_back({"downsample", DownsampleStage{cfg.scale, cfg.filter}});
  if (!full || roll_noise) rec.stages.push_back({"noise", NoiseStage{profile, noise_seed}});
  if (full && roll_second) rec.stages.push_back({"second_blur", BlurStage{secondary}});
  const int lr_w = downsamples ? width / cfg.scale : width;
  const int lr_h = downsamples ? height / cfg.scale : height;
  if (full && roll_resample && lr_w % 2 == 0 && lr_h % 2 == 0) {
    rec.stages.push_back({"resample", ResampleStage{2, cfg.filter}});
  }
  return rec;
}

Image apply_stage(const Image& img, const Stage& stage) {
  struct Visitor {
    const Image& img;
    Image operator()(const BlurStage& s) const { return convolve(img, make_kernel(s.kernel)); }
    Image operator()(const ExposureStage& s) const { return exposure_scale(img, s.factor); }
    Image operator()(const DownsampleStage& s) const { return downsample(img, s.scale, s.filter); }
    Image operator()(const NoiseStage& s) const { return sample_shot_read(img, s.profile, s.seed); }
    Image operator()(const ResampleStage& s) const {
      return upsample_bicubic(downsample(img, s.factor, s.filter), s.factor);
    }
  };
  return std::visit(Visitor{img}, stage.op);
}

Image replay(const Image& clean, const DegradationRecord& record) {
  require_packed(clean, "replay");
  Image current = clean;
  for (const Stage& stage : record.stages) current = apply_stage(current, stage);
  return current;
}

DegradationResult degrade(const Image& clean, const DegradationConfig& cfg, std::uint64_t image_index) {
  require_packed(clean, "degrade");
  DegradationResult result;
  result.record = plan_degradation(clean.width, clean.height, cfg, image_index);
  result.degraded = replay(clean, result.record);
  return result;
}

// ---- record text form ------------------------------------------------------

namespace {

constexpr std::string_view kRecordHeader = "rawforge-record 1";

std::string fmt_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string fmt_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_kernel(std::ostringstream& out, const KernelSpec& k) {
  out << " kind=" << to_string(k.kind);
  switch (k.kind) {
    case KernelKind::kIsoGaussian: out << " sigma=" << fmt_double(k.sigma_x); break;
    case KernelKind::kAnisoGaussian:
      out << " sigma_x=" << fmt_double(k.sigma_x) << " sigma_y=" << fmt_double(k.sigma_y)
          << " theta=" << fmt_double(k.theta);
      break;
    case KernelKind::kDisk: out << " radius=" << fmt_double(k.radius); break;
    case KernelKind::kMotion: out << " length=" << fmt_double(k.length) << " angle=" << fmt_double(k.angle); break;
    case KernelKind::kMeasuredPsf: break;
  }
  out << " size=" << k.size;
  // Paths go last and extend to the end of the line.
  if (k.kind == KernelKind::kMeasuredPsf) out << " path=" << k.psf_path;
}

struct Fields {
  std::vector<std::pair<std::string, std::string>> items;

  const std::string& get(std::string_view key) const {
    for (const auto& [k, v] : items) {
      if (k == key) return v;
    }
    throw FormatError("record stage is missing '" + std::string(key) + "'");
  }
  double number(std::string_view key) const {
    const std::string& s = get(key);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("bad number '" + s + "' in record");
    return v;
  }
  int integer(std::string_view key) const {
    const std::string& s = get(key);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("bad integer '" + s + "' in record");
    return v;
  }
  std::uint64_t hex(std::string_view key) const {
    const std::string& s = get(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("bad hex value '" + s + "' in record");
    return v;
  }
};

Fields split_fields(std::string_view rest) {
  Fields f;
  while (!rest.empty()) {
    while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    if (rest.empty()) break;
    const std::size_t eq = rest.find('=');
    if (eq == std::string_view::npos) throw FormatError("record field without '='");
    std::string key(rest.substr(0, eq));
    rest.remove_prefix(eq + 1);
    std::size_t end = key == "path" ? rest.size() : rest.find(' ');
    if (end == std::string_view::npos) end = rest.size();
    f.items.emplace_back(std::move(key), std::string(rest.substr(0, end)));
    rest.remove_prefix(end);
  }
  return f;
}

KernelSpec read_kernel(const Fields& f) {
  KernelSpec k;
  try {
    k.kind = parse_kernel_kind(f.get("kind"));
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  switch (k.kind) {
    case KernelKind::kIsoGaussian: k.sigma_x = k.sigma_y = f.number("sigma"); break;
    case KernelKind::kAnisoGaussian:
      k.sigma_x = f.number("sigma_x");
      k.sigma_y = f.number("sigma_y");
      k.theta = f.number("theta");
      break;
    case KernelKind::kDisk: k.radius = f.number("radius"); break;
    case KernelKind::kMotion:
      k.length = f.number("length");
      k.angle = f.number("angle");
      break;
    case KernelKind::kMeasuredPsf: k.psf_path = f.get("path"); break;
  }
  k.size = f.integer("size");
  return k;
}

}  // namespace

std::string DegradationRecord::serialize() const {
  std::ostringstream out;
  out << kRecordHeader << "\n";
  out << "level " << to_string(level) << "\n";
  out << "stream_seed " << fmt_hex(stream_seed) << "\n";
  for (const Stage& stage : stages) {
    out << "stage " << stage.name;
    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, BlurStage>) {
            write_kernel(out, op.kernel);
          } else if constexpr (std::is_same_v<T, ExposureStage>) {
            out << " op=exposure factor=" << fmt_double(op.factor);
          } else if constexpr (std::is_same_v<T, DownsampleStage>) {
            out << " op=downsample scale=" << op.scale << " filter=" << to_string(op.filter);
          } else if constexpr (std::is_same_v<T, NoiseStage>) {
            out << " op=noise profile=" << op.profile.name << " lambda_s=" << fmt_double(op.profile.lambda_shot)
                << " lambda_r=" << fmt_double(op.profile.lambda_read) << " seed=" << fmt_hex(op.seed);
          } else {
            out << " op=resample factor=" << op.factor << " filter=" << to_string(op.filter);
          }
        },
        stage.op);
    out << "\n";
  }
  return out.str();
}

DegradationRecord DegradationRecord::parse(std::string_view text) {
  DegradationRecord rec;
  bool header = false;
  bool have_level = false;
  int line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    try {
      if (!header) {
        if (line != kRecordHeader) throw FormatError("not a degradation record");
        header = true;
      } else if (line.starts_with("level ")) {
        rec.level = parse_level(line.substr(6));
        have_level = true;
      } else if (line.starts_with("stream_seed ")) {
        rec.stream_seed = Fields{{{"stream_seed", std::string(line.substr(12))}}}.hex("stream_seed");
      } else if (line.starts_with("stage ")) {
        std::string_view rest = line.substr(6);
        const std::size_t sp = rest.find(' ');
        Stage stage;
        stage.name = std::string(rest.substr(0, sp));
        const Fields f = split_fields(sp == std::string_view::npos ? std::string_view{} : rest.substr(sp + 1));
        const std::string* op = nullptr;
        for (const auto& [k, v] : f.items) {
          if (k == "op") op = &v;
        }
        if (!op) {
          stage.op = BlurStage{read_kernel(f)};
        } else if (*op == "exposure") {
          stage.op = ExposureStage{f.number("factor")};
        } else if (*op == "downsample") {
          stage.op = DownsampleStage{f.integer("scale"), parse_filter(f.get("filter"))};
        } else if (*op == "noise") {
          stage.op = NoiseStage{{f.get("profile"), f.number("lambda_s"), f.number("lambda_r")}, f.hex("seed")};
        } else if (*op == "resample") {
          stage.op = ResampleStage{f.integer("factor"), parse_filter(f.get("filter"))};
        } else {
          throw FormatError("unknown stage operation '" + *op + "'");
        }
        rec.stages.push_back(std::move(stage));
      } else {
        throw FormatError("unexpected line");
      }
    } catch (const Error& e) {
      throw FormatError("record line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header || !have_level) throw FormatError("degradation record is incomplete");
  return rec;
}

std::uint64_t DegradationRecord::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string digest_hex(std::uint64_t digest) { return fmt_hex(digest); }

}  // namespace rawforge
