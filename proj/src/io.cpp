#include "rawforge/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rawforge/error.hpp"

namespace rawforge {

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return bytes;
}

void write_file_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

std::string read_text_file(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_text_file(const fs::path& path, std::string_view text) {
  write_file_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

// ---- key = value ---------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

const std::string* KeyValueSection::find(std::string_view key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::vector<KeyValueSection> parse_key_value(std::string_view text) {
  std::vector<KeyValueSection> sections(1);
  int line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError("line " + std::to_string(line_no) + ": unterminated section header");
      sections.push_back({std::string(trim(line.substr(1, line.size() - 2))), line_no, {}});
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) throw FormatError("line " + std::to_string(line_no) + ": empty key");
    auto& current = sections.back();
    if (current.find(key)) {
      throw FormatError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
    }
    current.entries.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  if (sections.front().entries.empty()) sections.erase(sections.begin());
  return sections;
}

// ---- sidecar metadata ------------------------------------------------------

fs::path meta_path_for(const fs::path& image_path) {
  fs::path p = image_path;
  p.replace_extension(".meta");
  return p;
}

namespace {

int parse_int_value(const std::string& value, std::string_view key) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw FormatError("'" + std::string(key) + "' is not an integer: '" + value + "'");
  }
  return out;
}

}  // namespace

SensorMeta parse_meta(std::string_view text) {
  const auto sections = parse_key_value(text);
  if (sections.size() > 1 || (!sections.empty() && !sections.front().name.empty())) {
    throw FormatError("sensor metadata must not contain sections");
  }
  static const KeyValueSection kEmpty;
  const KeyValueSection& kv = sections.empty() ? kEmpty : sections.front();
  for (const auto& [key, value] : kv.entries) {
    if (key != "black_level" && key != "white_level" && key != "bit_depth" && key != "cfa") {
      throw FormatError("unknown metadata key '" + key + "'");
    }
  }
  auto require = [&](std::string_view key) -> const std::string& {
    const std::string* v = kv.find(key);
    if (!v) throw FormatError("sensor metadata is missing required key '" + std::string(key) + "'");
    return *v;
  };
  SensorMeta meta;
  meta.black_level = parse_int_value(require("black_level"), "black_level");
  meta.white_level = parse_int_value(require("white_level"), "white_level");
  meta.bit_depth = parse_int_value(require("bit_depth"), "bit_depth");
  try {
    meta.cfa = parse_cfa(require("cfa"));
    meta.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("invalid sensor metadata: ") + e.what());
  }
  return meta;
}

std::string format_meta(const SensorMeta& meta) {
  std::ostringstream out;
  out << "black_level = " << meta.black_level << "\n"
      << "white_level = " << meta.white_level << "\n"
      << "bit_depth = " << meta.bit_depth << "\n"
      << "cfa = " << to_string(meta.cfa) << "\n";
  return out.str();
}

SensorMeta read_meta(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_meta(text);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_meta(const fs::path& path, const SensorMeta& meta) { write_text_file(path, format_meta(meta)); }

// ---- PNM ---------------------------------------------------------------------

namespace {

// Header of a binary PNM: magic, width, height, maxval, then exactly one
// whitespace byte before the samples. Comments start with '#'.
struct PnmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::size_t data_offset = 0;
};

PnmHeader parse_pnm_header(const std::uint8_t* data, std::size_t size, std::string_view magic) {
  if (size < 2 || std::memcmp(data, magic.data(), 2) != 0) {
    throw FormatError("not a binary " + std::string(magic) + " file");
  }
  std::size_t pos = 2;
  auto next_int = [&]() {
    for (;;) {
      while (pos < size && std::isspace(data[pos])) ++pos;
      if (pos < size && data[pos] == '#') {
        while (pos < size && data[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= size || !std::isdigit(data[pos])) throw FormatError("malformed " + std::string(magic) + " header");
    long long v = 0;
    while (pos < size && std::isdigit(data[pos])) {
      v = v * 10 + (data[pos++] - '0');
      if (v > (1 << 30)) throw FormatError("header value out of range");
    }
    return int(v);
  };
  PnmHeader h;
  h.width = next_int();
  h.height = next_int();
  h.maxval = next_int();
  if (pos >= size || !std::isspace(data[pos])) throw FormatError("malformed " + std::string(magic) + " header");
  h.data_offset = pos + 1;
  if (h.width <= 0 || h.height <= 0) throw FormatError("image dimensions must be positive");
  if (h.maxval <= 0 || h.maxval > 65535) throw FormatError("maxval must be in [1, 65535]");
  return h;
}

void append_text(std::vector<std::uint8_t>& out, std::string_view text) { out.insert(out.end(), text.begin(), text.end()); }

}  // namespace

std::vector<std::uint8_t> encode_pgm(const MosaicImage& mosaic) {
  mosaic.validate();
  const std::uint16_t peak = mosaic.data.empty() ? 0 : *std::max_element(mosaic.data.begin(), mosaic.data.end());
  const int maxval = peak <= mosaic.meta.white_level ? mosaic.meta.white_level : mosaic.meta.max_code();
  std::vector<std::uint8_t> out;
  append_text(out, "P5\n" + std::to_string(mosaic.width) + " " + std::to_string(mosaic.height) + "\n" +
                       std::to_string(maxval) + "\n");
  const bool wide = maxval > 255;
  out.reserve(out.size() + mosaic.data.size() * (wide ? 2 : 1));
  for (std::uint16_t v : mosaic.data) {
    if (wide) out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v & 0xFF));
  }
  return out;
}

MosaicImage decode_pgm(const std::vector<std::uint8_t>& bytes, const SensorMeta& meta) {
  meta.validate();
  const PnmHeader h = parse_pnm_header(bytes.data(), bytes.size(), "P5");
  const bool wide = h.maxval > 255;
  const std::size_t count = std::size_t(h.width) * h.height;
  const std::size_t need = count * (wide ? 2 : 1);
  if (bytes.size() - h.data_offset < need) throw FormatError("PGM sample data is truncated");
  MosaicImage m;
  m.width = h.width;
  m.height = h.height;
  m.meta = meta;
  m.data.resize(count);
  const std::uint8_t* p = bytes.data() + h.data_offset;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint16_t v = wide ? std::uint16_t((p[2 * i] << 8) | p[2 * i + 1]) : p[i];
    if (v > h.maxval) throw FormatError("PGM sample exceeds maxval");
    m.data[i] = v;
  }
  try {
    m.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  return m;
}

void write_pgm(const fs::path& path, const MosaicImage& mosaic) { write_file_bytes(path, encode_pgm(mosaic)); }

MosaicImage read_pgm(const fs::path& path, const SensorMeta& meta) {
  try {
    return decode_pgm(read_file_bytes(path), meta);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

MosaicImage load_mosaic(const fs::path& pgm_path) {
  const fs::path meta_path = meta_path_for(pgm_path);
  if (!fs::exists(meta_path)) throw IoError("missing sensor metadata sidecar '" + meta_path.string() + "'");
  return read_pgm(pgm_path, read_meta(meta_path));
}

void save_mosaic(const fs::path& pgm_path, const MosaicImage& mosaic) {
  write_pgm(pgm_path, mosaic);
  write_meta(meta_path_for(pgm_path), mosaic.meta);
}

std::pair<int, int> peek_pgm_size(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> head(4096);
  in.read(reinterpret_cast<char*>(head.data()), std::streamsize(head.size()));
  head.resize(std::size_t(in.gcount()));
  try {
    const PnmHeader h = parse_pnm_header(head.data(), head.size(), "P5");
    return {h.width, h.height};
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// ---- little-endian helpers -------------------------------------------------

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

void put_f32le(std::vector<std::uint8_t>& out, float v) { put_u32le(out, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t get_u32le(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

float get_f32le(const std::uint8_t* p) { return std::bit_cast<float>(get_u32le(p)); }

// ---- .praw -------------------------------------------------------------------

namespace {
constexpr std::size_t kPrawHeaderSize = 20;
}

std::vector<std::uint8_t> encode_praw(const Image& packed) {
  require_packed(packed, "write_praw");
  std::vector<std::uint8_t> out;
  out.reserve(kPrawHeaderSize + packed.data.size() * 4);
  append_text(out, "PRAW");
  put_u32le(out, std::uint32_t(packed.width));
  put_u32le(out, std::uint32_t(packed.height));
  put_u32le(out, std::uint32_t(packed.channels));
  put_u32le(out, 0);
  for (float v : packed.data) put_f32le(out, v);
  return out;
}

Image decode_praw(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kPrawHeaderSize || std::memcmp(bytes.data(), "PRAW", 4) != 0) {
    throw FormatError("not a PRAW file");
  }
  const std::uint32_t w = get_u32le(bytes.data() + 4);
  const std::uint32_t h = get_u32le(bytes.data() + 8);
  const std::uint32_t c = get_u32le(bytes.data() + 12);
  const std::uint32_t reserved = get_u32le(bytes.data() + 16);
  if (c != kPackedChannels) throw FormatError("PRAW channel count must be 4, got " + std::to_string(c));
  if (reserved != 0) throw FormatError("PRAW reserved field must be 0");
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20)) throw FormatError("PRAW dimensions out of range");
  const std::size_t count = std::size_t(w) * h * c;
  if (bytes.size() != kPrawHeaderSize + count * 4) throw FormatError("PRAW payload size does not match header");
  Image img{int(w), int(h), int(c)};
  for (std::size_t i = 0; i < count; ++i) img.data[i] = get_f32le(bytes.data() + kPrawHeaderSize + 4 * i);
  return img;
}

void write_praw(const fs::path& path, const Image& packed) { write_file_bytes(path, encode_praw(packed)); }

Image read_praw(const fs::path& path) {
  try {
    return decode_praw(read_file_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// ---- PPM -----------------------------------------------------------------------

std::vector<std::uint8_t> encode_ppm(const Rgb8Image& rgb) {
  std::vector<std::uint8_t> out;
  append_text(out, "P6\n" + std::to_string(rgb.width) + " " + std::to_string(rgb.height) + "\n255\n");
  out.insert(out.end(), rgb.data.begin(), rgb.data.end());
  return out;
}

void write_ppm(const fs::path& path, const Rgb8Image& rgb) { write_file_bytes(path, encode_ppm(rgb)); }

Rgb8Image read_ppm(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  const PnmHeader h = parse_pnm_header(bytes.data(), bytes.size(), "P6");
  if (h.maxval > 255) throw FormatError(path.string() + ": only 8-bit PPM is supported");
  const std::size_t need = std::size_t(h.width) * h.height * 3;
  if (bytes.size() - h.data_offset < need) throw FormatError(path.string() + ": PPM data is truncated");
  Rgb8Image rgb{h.width, h.height, {}};
  rgb.data.assign(bytes.begin() + std::ptrdiff_t(h.data_offset), bytes.begin() + std::ptrdiff_t(h.data_offset + need));
  return rgb;
}

}  // namespace rawforge
