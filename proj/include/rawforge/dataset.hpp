#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rawforge/pipeline.hpp"

namespace rawforge {

struct ManifestEntry {
  std::string clean_path;     // relative to the output directory
  std::string degraded_path;  // relative to the output directory
  std::uint64_t image_index = 0;
  DegradationLevel level = DegradationLevel::kI;
  std::uint64_t digest = 0;
};

// clean \t degraded \t image_index \t level \t digest (16 hex digits)
std::string format_manifest_line(const ManifestEntry& entry);
ManifestEntry parse_manifest_line(std::string_view line);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

struct DatasetReport {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> failures;  // "<file>: <reason>"
};

inline constexpr const char* kManifestName = "manifest.tsv";

// For every *.pgm in `input_dir` (sorted by name): normalize, pack, cut
// into patches (or crop to a multiple of the scale when patching is off),
// degrade and write
//   clean/<stem>_pNNNN.praw, degraded/<stem>_pNNNN.praw, records/<stem>_pNNNN.record
// plus manifest.tsv in input order. Image indices are assigned from the
// PGM headers before any pixel work, so the output does not depend on
// `jobs`. Unreadable inputs are reported in `failures` and skipped.
DatasetReport synth_dataset(const std::filesystem::path& input_dir,
                            const std::filesystem::path& output_dir, const DegradationConfig& cfg,
                            int jobs = 1);

}  // namespace rawforge
