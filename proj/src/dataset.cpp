#include "rawforge/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "rawforge/error.hpp"
#include "rawforge/io.hpp"
#include "rawforge/parallel.hpp"
#include "rawforge/raw_core.hpp"

namespace rawforge {

namespace fs = std::filesystem;

std::string format_manifest_line(const ManifestEntry& e) {
  std::ostringstream out;
  out << e.clean_path << '\t' << e.degraded_path << '\t' << e.image_index << '\t' << to_string(e.level) << '\t'
      << digest_hex(e.digest);
  return out.str();
}

ManifestEntry parse_manifest_line(std::string_view line) {
  std::vector<std::string_view> cols;
  while (true) {
    const std::size_t tab = line.find('\t');
    cols.push_back(line.substr(0, tab));
    if (tab == std::string_view::npos) break;
    line.remove_prefix(tab + 1);
  }
  if (cols.size() != 5) throw FormatError("manifest line must have 5 tab-separated columns");
  ManifestEntry e;
  e.clean_path = std::string(cols[0]);
  e.degraded_path = std::string(cols[1]);
  auto [p1, ec1] = std::from_chars(cols[2].data(), cols[2].data() + cols[2].size(), e.image_index);
  if (ec1 != std::errc() || p1 != cols[2].data() + cols[2].size()) throw FormatError("bad image index in manifest");
  try {
    e.level = parse_level(cols[3]);
  } catch (const InvalidArgument& err) {
    throw FormatError(err.what());
  }
  auto [p2, ec2] = std::from_chars(cols[4].data(), cols[4].data() + cols[4].size(), e.digest, 16);
  if (ec2 != std::errc() || p2 != cols[4].data() + cols[4].size()) throw FormatError("bad digest in manifest");
  return e;
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  const std::string text = read_text_file(path);
  std::vector<ManifestEntry> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      entries.push_back(parse_manifest_line(line));
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return entries;
}

namespace {

struct InputPlan {
  fs::path path;
  std::uint64_t first_index = 0;
  std::size_t patch_count = 0;
  std::string error;
};

std::string pair_name(const fs::path& input, std::size_t patch) {
  char suffix[32];
  std::snprintf(suffix, sizeof(suffix), "_p%04zu", patch);
  return input.stem().string() + suffix;
}

// Working image for one input: patches, or the whole packed image cropped to a multiple of the scale.
std::vector<Image> cut(const Image& packed, const DegradationConfig& cfg) {
  if (cfg.patch_size > 0) return extract_patches(packed, cfg.patch_size, cfg.patch_stride);
  const int w = packed.width - packed.width % cfg.scale;
  const int h = packed.height - packed.height % cfg.scale;
  if (w == 0 || h == 0) throw InvalidArgument("image is smaller than the scale factor");
  return {crop(packed, 0, 0, w, h)};
}

std::size_t planned_count(int packed_w, int packed_h, const DegradationConfig& cfg) {
  if (cfg.patch_size > 0) return patch_anchors(packed_w, packed_h, cfg.patch_size, cfg.patch_stride).size();
  if (packed_w < cfg.scale || packed_h < cfg.scale) throw InvalidArgument("image is smaller than the scale factor");
  return 1;
}

}  // namespace

DatasetReport synth_dataset(const fs::path& input_dir, const fs::path& output_dir, const DegradationConfig& cfg,
                            int jobs) {
  cfg.validate();
  if (!fs::is_directory(input_dir)) throw IoError("input directory '" + input_dir.string() + "' does not exist");

  std::vector<InputPlan> inputs;
  for (const auto& entry : fs::directory_iterator(input_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") inputs.push_back({entry.path(), 0, 0, {}});
  }
  std::sort(inputs.begin(), inputs.end(), [](const InputPlan& a, const InputPlan& b) { return a.path < b.path; });
  if (inputs.empty()) throw IoError("no .pgm files in '" + input_dir.string() + "'");

  // Indices come from the headers alone so that workers never coordinate.
  std::uint64_t next_index = 0;
  for (InputPlan& in : inputs) {
    try {
      const auto [w, h] = peek_pgm_size(in.path);
      if (w % 2 != 0 || h % 2 != 0) throw FormatError("mosaic dimensions must be even");
      in.patch_count = planned_count(w / 2, h / 2, cfg);
      in.first_index = next_index;
      next_index += in.patch_count;
    } catch (const Error& e) {
      in.error = e.what();
    }
  }

  for (const char* sub : {"clean", "degraded", "records"}) fs::create_directories(output_dir / sub);

  std::vector<std::vector<ManifestEntry>> results(inputs.size());
  parallel_for(inputs.size(), jobs, [&](std::size_t i) {
    InputPlan& in = inputs[i];
    if (!in.error.empty()) return;
    try {
      const MosaicImage mosaic = load_mosaic(in.path);
      const Image packed = pack_rggb(normalize_mosaic(mosaic), mosaic.meta.cfa);
      const std::vector<Image> pieces = cut(packed, cfg);
      if (pieces.size() != in.patch_count) throw FormatError("pixel data does not match the header dimensions");
      std::vector<ManifestEntry> entries;
      for (std::size_t j = 0; j < pieces.size(); ++j) {
        const std::uint64_t index = in.first_index + j;
        const DegradationResult result = degrade(pieces[j], cfg, index);
        const std::string name = pair_name(in.path, j);
        ManifestEntry e;
        e.clean_path = "clean/" + name + ".praw";
        e.degraded_path = "degraded/" + name + ".praw";
        e.image_index = index;
        e.level = cfg.level;
        e.digest = result.record.digest();
        write_praw(output_dir / e.clean_path, pieces[j]);
        write_praw(output_dir / e.degraded_path, result.degraded);
        write_text_file(output_dir / "records" / (name + ".record"), result.record.serialize());
        entries.push_back(std::move(e));
      }
      results[i] = std::move(entries);
    } catch (const Error& e) {
      in.error = e.what();
    }
  });

  DatasetReport report;
  std::string manifest;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!inputs[i].error.empty()) {
      report.failures.push_back(inputs[i].path.filename().string() + ": " + inputs[i].error);
      continue;
    }
    for (auto& e : results[i]) {
      manifest += format_manifest_line(e) + "\n";
      report.entries.push_back(std::move(e));
    }
  }
  write_text_file(output_dir / kManifestName, manifest);
  return report;
}

}  // namespace rawforge
