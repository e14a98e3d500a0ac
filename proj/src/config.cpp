#include "rawforge/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "rawforge/error.hpp"

namespace rawforge {

namespace {

// Typed access to one section; every key must be consumed.
class SectionReader {
 public:
  SectionReader(const KeyValueSection& section) : section_(section) {}

  const std::string* raw(std::string_view key) {
    used_.insert(std::string(key));
    return section_.find(key);
  }

  void number(std::string_view key, double& out) {
    if (const std::string* v = raw(key)) out = parse_double(*v, key);
  }
  void integer(std::string_view key, int& out) {
    if (const std::string* v = raw(key)) {
      const double d = parse_double(*v, key);
      if (d != std::floor(d) || std::abs(d) > 1e9) throw FormatError(where(key) + " must be an integer");
      out = int(d);
    }
  }
  void text(std::string_view key, std::string& out) {
    if (const std::string* v = raw(key)) out = *v;
  }
  template <typename Parse, typename T>
  void choice(std::string_view key, T& out, Parse parse) {
    if (const std::string* v = raw(key)) {
      try {
        out = parse(*v);
      } catch (const InvalidArgument& e) {
        throw FormatError(where(key) + ": " + e.what());
      }
    }
  }

  void finish() const {
    for (const auto& [key, value] : section_.entries) {
      if (!used_.count(key)) throw FormatError(where(key) + ": unknown key");
    }
  }

  std::string where(std::string_view key) const {
    return "[" + section_.name + "] '" + std::string(key) + "' (section at line " + std::to_string(section_.line) + ")";
  }

  double parse_double(const std::string& s, std::string_view key) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError(where(key) + " is not a number: '" + s + "'");
    return v;
  }

 private:
  const KeyValueSection& section_;
  std::set<std::string> used_;
};

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> items;
  while (!s.empty()) {
    const std::size_t comma = s.find(',');
    std::string_view item = s.substr(0, comma);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
    if (!item.empty()) items.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return items;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

ProfileRange read_profile(const KeyValueSection& section) {
  SectionReader r(section);
  ProfileRange p;
  r.text("name", p.name);
  r.number("lambda_s_min", p.shot_min);
  r.number("lambda_s_max", p.shot_max);
  r.number("lambda_r_min", p.read_min);
  r.number("lambda_r_max", p.read_max);
  if (!section.find("name")) throw FormatError("[profile] at line " + std::to_string(section.line) + " needs a name");
  for (const char* key : {"lambda_s_min", "lambda_s_max", "lambda_r_min", "lambda_r_max"}) {
    if (!section.find(key)) throw FormatError(r.where(key) + " is required");
  }
  r.finish();
  return p;
}

void validate_as_format(const auto& value) {
  try {
    value.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("invalid configuration: ") + e.what());
  }
}

}  // namespace

ProfileRegistry parse_registry(std::string_view text) {
  ProfileRegistry reg;
  for (const auto& section : parse_key_value(text)) {
    if (section.name != "profile") throw FormatError("noise registry may only contain [profile] sections");
    reg.profiles.push_back(read_profile(section));
  }
  validate_as_format(reg);
  return reg;
}

ProfileRegistry load_registry(const std::filesystem::path& path) { return parse_registry(read_text_file(path)); }

std::string format_registry(const ProfileRegistry& registry) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& p : registry.profiles) {
    out << "[profile]\nname = " << p.name << "\nlambda_s_min = " << p.shot_min << "\nlambda_s_max = " << p.shot_max
        << "\nlambda_r_min = " << p.read_min << "\nlambda_r_max = " << p.read_max << "\n\n";
  }
  return out.str();
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  DegradationConfig& d = cfg.degradation;
  ProfileRegistry inline_profiles;
  std::string registry_path;

  for (const auto& section : parse_key_value(text)) {
    SectionReader r(section);
    if (section.name == "pipeline") {
      r.choice("level", d.level, parse_level);
      r.integer("scale", d.scale);
      r.choice("filter", d.filter, parse_filter);
      if (const std::string* seed = r.raw("seed")) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(seed->data(), seed->data() + seed->size(), v);
        if (ec != std::errc() || ptr != seed->data() + seed->size()) throw FormatError(r.where("seed") + " must be an unsigned integer");
        d.seed = v;
      }
      r.number("exposure_min", d.exposure.min);
      r.number("exposure_max", d.exposure.max);
      r.number("p_blur", d.probabilities.blur);
      r.number("p_exposure", d.probabilities.exposure);
      r.number("p_noise", d.probabilities.noise);
      r.number("p_second_kernel", d.probabilities.second_kernel);
      r.number("p_resample", d.probabilities.resample);
      r.choice("second_kernel", d.second_kernel, [](std::string_view s) {
        if (s == "motion") return SecondKernelSource::kMotion;
        if (s == "pool") return SecondKernelSource::kPool;
        throw InvalidArgument("expected 'motion' or 'pool'");
      });
      r.integer("patch_size", d.patch_size);
      r.integer("patch_stride", d.patch_stride);
      r.text("noise_registry", registry_path);
    } else if (section.name == "kernels") {
      KernelPool& k = d.kernels;
      r.number("weight_iso_gaussian", k.weight_iso_gaussian);
      r.number("weight_aniso_gaussian", k.weight_aniso_gaussian);
      r.number("weight_disk", k.weight_disk);
      r.number("weight_motion", k.weight_motion);
      r.number("weight_measured_psf", k.weight_measured_psf);
      r.number("iso_sigma_min", k.iso_sigma.min);
      r.number("iso_sigma_max", k.iso_sigma.max);
      r.number("aniso_sigma_min", k.aniso_sigma.min);
      r.number("aniso_sigma_max", k.aniso_sigma.max);
      r.number("disk_radius_min", k.disk_radius.min);
      r.number("disk_radius_max", k.disk_radius.max);
      r.number("motion_length_min", k.motion_length.min);
      r.number("motion_length_max", k.motion_length.max);
      if (const std::string* files = r.raw("psf_files")) {
        k.psf_files.clear();
        for (const auto& f : split_list(*files)) k.psf_files.push_back(resolve(base_dir, f).string());
      }
    } else if (section.name == "profile") {
      inline_profiles.profiles.push_back(read_profile(section));
      continue;
    } else if (section.name == "isp") {
      IspParams& isp = cfg.isp;
      r.number("wb_r", isp.wb_gains[0]);
      r.number("wb_g", isp.wb_gains[1]);
      r.number("wb_b", isp.wb_gains[2]);
      if (const std::string* ccm = r.raw("ccm")) {
        std::istringstream in(*ccm);
        for (double& v : isp.ccm) {
          if (!(in >> v)) throw FormatError(r.where("ccm") + " needs 9 numbers");
        }
        std::string extra;
        if (in >> extra) throw FormatError(r.where("ccm") + " needs exactly 9 numbers");
      }
      r.choice("gamma", isp.gamma, parse_gamma);
      r.choice("tonemap", isp.tonemap, parse_tonemap);
    } else {
      throw FormatError("unknown configuration section [" + section.name + "] at line " + std::to_string(section.line));
    }
    r.finish();
  }

  if (!registry_path.empty() && !inline_profiles.profiles.empty()) {
    throw FormatError("use either noise_registry or inline [profile] sections, not both");
  }
  if (!registry_path.empty()) {
    d.noise = load_registry(resolve(base_dir, registry_path));
  } else if (!inline_profiles.profiles.empty()) {
    d.noise = inline_profiles;
  }
  validate_as_format(d);
  validate_as_format(cfg.isp);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_config(text, path.parent_path());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace rawforge
