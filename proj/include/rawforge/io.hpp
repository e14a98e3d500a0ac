#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rawforge/image.hpp"
#include "rawforge/raw_core.hpp"

namespace rawforge {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_file_bytes(const fs::path& path);
void write_file_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes);
std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, std::string_view text);

// `key = value` text with optional `[section]` headers and `#` comments.
// Entries before the first header belong to a section with an empty name.
struct KeyValueSection {
  std::string name;
  int line = 0;
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(std::string_view key) const;
};

std::vector<KeyValueSection> parse_key_value(std::string_view text);

// ---- Sensor metadata sidecar -------------------------------------------
// <name>.meta next to <name>.pgm with keys black_level, white_level,
// bit_depth and cfa.

fs::path meta_path_for(const fs::path& image_path);
SensorMeta parse_meta(std::string_view text);
std::string format_meta(const SensorMeta& meta);
SensorMeta read_meta(const fs::path& path);
void write_meta(const fs::path& path, const SensorMeta& meta);

// ---- Binary PGM (P5) ---------------------------------------------------
// Samples are big-endian 16-bit when maxval > 255, one byte otherwise.
// The writer uses maxval = white_level, or 2^bit_depth - 1 when samples
// exceed the white level.

std::vector<std::uint8_t> encode_pgm(const MosaicImage& mosaic);
MosaicImage decode_pgm(const std::vector<std::uint8_t>& bytes, const SensorMeta& meta);
void write_pgm(const fs::path& path, const MosaicImage& mosaic);
MosaicImage read_pgm(const fs::path& path, const SensorMeta& meta);

// PGM plus its sidecar.
MosaicImage load_mosaic(const fs::path& pgm_path);
void save_mosaic(const fs::path& pgm_path, const MosaicImage& mosaic);

// Width and height from the PGM header without reading the samples.
std::pair<int, int> peek_pgm_size(const fs::path& path);

// ---- Packed tensor (.praw) ---------------------------------------------
// "PRAW", u32 width, u32 height, u32 channels (= 4), u32 reserved (= 0),
// then width*height*4 f32, all little-endian, channel-last row-major.

std::vector<std::uint8_t> encode_praw(const Image& packed);
Image decode_praw(const std::vector<std::uint8_t>& bytes);
void write_praw(const fs::path& path, const Image& packed);
Image read_praw(const fs::path& path);

// ---- Binary PPM (P6), 8-bit ------------------------------------------

std::vector<std::uint8_t> encode_ppm(const Rgb8Image& rgb);
void write_ppm(const fs::path& path, const Rgb8Image& rgb);
Rgb8Image read_ppm(const fs::path& path);

// Little-endian helpers shared by the binary formats.
void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_f32le(std::vector<std::uint8_t>& out, float v);
std::uint32_t get_u32le(const std::uint8_t* p);
float get_f32le(const std::uint8_t* p);

}  // namespace rawforge
