#include <cstring>

#include "doctest.h"
#include "rawforge/error.hpp"
#include "rawforge/io.hpp"
#include "rawforge/kernels.hpp"
#include "support.hpp"

using namespace rawforge;

namespace {

MosaicImage sample_mosaic(int w, int h, SensorMeta meta, std::uint64_t seed) {
  MosaicImage m;
  m.width = w;
  m.height = h;
  m.meta = meta;
  Rng rng(seed);
  for (int i = 0; i < w * h; ++i) m.data.push_back(std::uint16_t(rng.index(std::size_t(meta.white_level) + 1)));
  return m;
}

}  // namespace

TEST_CASE("meta sidecar parses required keys and names the missing one") {
  const SensorMeta m = parse_meta("black_level = 512\nwhite_level=16383\n# comment\nbit_depth = 14\ncfa = bggr\n");
  CHECK(m == SensorMeta{512, 16383, 14, CfaPattern::kBggr});
  CHECK(parse_meta(format_meta(m)) == m);
  try {
    parse_meta("black_level = 512\nbit_depth = 14\ncfa = RGGB\n");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("white_level") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_meta("black_level = 512\nwhite_level = 100\nbit_depth = 14\ncfa = RGGB\n"), FormatError);
  CHECK_THROWS_AS(parse_meta("black_level = x\nwhite_level = 100\nbit_depth = 14\ncfa = RGGB\n"), FormatError);
  CHECK_THROWS_AS(parse_meta("black_level = 0\nwhite_level = 100\nbit_depth = 14\ncfa = RGGB\ncolor = 1\n"), FormatError);
}

TEST_CASE("PGM header and big-endian 16-bit samples") {
  MosaicImage m;
  m.width = 2;
  m.height = 2;
  m.meta = {0, 4095, 12, CfaPattern::kRggb};
  m.data = {0x0102, 0x0A0B, 4095, 0};
  const auto bytes = encode_pgm(m);
  const std::string header = "P5\n2 2\n4095\n";
  REQUIRE(bytes.size() == header.size() + 8);
  CHECK(std::memcmp(bytes.data(), header.data(), header.size()) == 0);
  CHECK(bytes[header.size()] == 0x01);
  CHECK(bytes[header.size() + 1] == 0x02);
  CHECK(bytes[header.size() + 2] == 0x0A);
  CHECK(decode_pgm(bytes, m.meta) == m);
}

TEST_CASE("PGM reader accepts comments and 8-bit samples") {
  const std::string text = "P5\n# made by hand\n2 2\n# maxval\n255\n";
  std::vector<std::uint8_t> bytes(text.begin(), text.end());
  for (std::uint8_t v : {10, 20, 30, 40}) bytes.push_back(v);
  const MosaicImage m = decode_pgm(bytes, {0, 255, 8, CfaPattern::kRggb});
  CHECK(m.data == std::vector<std::uint16_t>{10, 20, 30, 40});
  CHECK(encode_pgm(m) == std::vector<std::uint8_t>({'P', '5', '\n', '2', ' ', '2', '\n', '2', '5', '5', '\n', 10, 20, 30, 40}));
}

TEST_CASE("PGM reader rejects malformed files") {
  const SensorMeta meta{0, 1023, 10, CfaPattern::kRggb};
  const std::string truncated = "P5\n4 4\n1023\n\x01\x02";
  CHECK_THROWS_AS(decode_pgm({truncated.begin(), truncated.end()}, meta), FormatError);
  const std::string wrong_magic = "P2\n2 2\n1023\n";
  CHECK_THROWS_AS(decode_pgm({wrong_magic.begin(), wrong_magic.end()}, meta), FormatError);
  std::string odd = "P5\n3 2\n255\n";
  odd.append(6, '\x01');
  CHECK_THROWS_AS(decode_pgm({odd.begin(), odd.end()}, meta), FormatError);
  std::string too_deep = "P5\n2 2\n65535\n";
  too_deep.append("\xff\xff\0\0\0\0\0\0", 8);
  CHECK_THROWS_AS(decode_pgm({too_deep.begin(), too_deep.end()}, meta), FormatError);
}

TEST_CASE("PGM + meta files survive write-read-write byte-identically") {
  testing::TempDir dir("io_pgm");
  for (const SensorMeta& meta : {SensorMeta{512, 16383, 14, CfaPattern::kRggb}, SensorMeta{64, 1023, 10, CfaPattern::kGbrg},
                                 SensorMeta{16, 255, 8, CfaPattern::kBggr}}) {
    const MosaicImage m = sample_mosaic(6, 4, meta, std::uint64_t(meta.white_level));
    save_mosaic(dir / "a.pgm", m);
    const MosaicImage back = load_mosaic(dir / "a.pgm");
    CHECK(back == m);
    save_mosaic(dir / "b.pgm", back);
    CHECK(read_file_bytes(dir / "a.pgm") == read_file_bytes(dir / "b.pgm"));
    CHECK(read_file_bytes(dir / "a.meta") == read_file_bytes(dir / "b.meta"));
  }
  CHECK(peek_pgm_size(dir / "a.pgm") == std::pair{6, 4});
  std::filesystem::remove(dir / "a.meta");
  CHECK_THROWS_AS(load_mosaic(dir / "a.pgm"), IoError);
}

TEST_CASE("PRAW layout and bit-exact round trip") {
  Image img(3, 2, 4);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = float(i) / 7.0f;
  img.data[5] = -0.0f;
  const auto bytes = encode_praw(img);
  REQUIRE(bytes.size() == 20 + 3 * 2 * 4 * 4);
  CHECK(std::memcmp(bytes.data(), "PRAW", 4) == 0);
  CHECK(get_u32le(bytes.data() + 4) == 3);
  CHECK(get_u32le(bytes.data() + 8) == 2);
  CHECK(get_u32le(bytes.data() + 12) == 4);
  CHECK(get_u32le(bytes.data() + 16) == 0);
  CHECK(bytes[20 + 4] == 0x25);  // 1/7 = 0x3E124925, little-endian low byte first
  CHECK(get_f32le(bytes.data() + 20 + 4 * 7) == img.data[7]);

  const Image back = decode_praw(bytes);
  CHECK(encode_praw(back) == bytes);

  testing::TempDir dir("io_praw");
  write_praw(dir / "x.praw", testing::random_image(17, 9, 4, 3));
  const Image r1 = read_praw(dir / "x.praw");
  write_praw(dir / "y.praw", r1);
  CHECK(read_file_bytes(dir / "x.praw") == read_file_bytes(dir / "y.praw"));
}

TEST_CASE("PRAW reader rejects bad headers") {
  auto bytes = encode_praw(Image(2, 2, 4));
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_praw(bad), FormatError);
  bad = bytes;
  bad[12] = 3;
  CHECK_THROWS_AS(decode_praw(bad), FormatError);
  bad = bytes;
  bad[16] = 1;
  CHECK_THROWS_AS(decode_praw(bad), FormatError);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS(decode_praw(bad), FormatError);
  CHECK_THROWS_AS(encode_praw(Image(2, 2, 3)), InvalidArgument);
  CHECK_THROWS_AS(read_praw("/nonexistent/file.praw"), IoError);
}

TEST_CASE("PSF1 files survive write-read-write byte-identically") {
  testing::TempDir dir("io_psf");
  PsfGrid grid{5, {}};
  Rng rng(9);
  for (int i = 0; i < 25; ++i) grid.weights.push_back(float(rng.uniform(-0.01, 1.0)));
  write_psf_grid(dir / "a.psf", grid);
  const PsfGrid back = read_psf_grid(dir / "a.psf");
  CHECK(back == grid);
  write_psf_grid(dir / "b.psf", back);
  CHECK(read_file_bytes(dir / "a.psf") == read_file_bytes(dir / "b.psf"));
}

TEST_CASE("PPM output") {
  Rgb8Image rgb{2, 1, {1, 2, 3, 4, 5, 6}};
  const auto bytes = encode_ppm(rgb);
  const std::string header = "P6\n2 1\n255\n";
  CHECK(std::string(bytes.begin(), bytes.begin() + std::ptrdiff_t(header.size())) == header);
  testing::TempDir dir("io_ppm");
  write_ppm(dir / "a.ppm", rgb);
  CHECK(read_ppm(dir / "a.ppm") == rgb);
}

TEST_CASE("key = value parser") {
  const auto sections = parse_key_value("top = 1\n[a]\nx = 2 # trailing\n\n[b]\ny=3\n");
  REQUIRE(sections.size() == 3);
  CHECK(sections[0].name.empty());
  CHECK(*sections[1].find("x") == "2");
  CHECK(sections[2].name == "b");
  CHECK_THROWS_AS(parse_key_value("[a\n"), FormatError);
  CHECK_THROWS_AS(parse_key_value("novalue\n"), FormatError);
  CHECK_THROWS_AS(parse_key_value("x = 1\nx = 2\n"), FormatError);
}
