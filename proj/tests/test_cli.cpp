#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "rawforge/dataset.hpp"
#include "rawforge/io.hpp"
#include "rawforge/noise.hpp"
#include "support.hpp"

using namespace rawforge;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(const testing::TempDir& dir, const std::string& args, const std::string& env = "") {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = env + " '" + std::string(RAWFORGE_CLI_PATH) + "' " + args + " >'" + out.string() + "' 2>'" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text_file(out);
  r.err = read_text_file(err);
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

void write_mosaic(const fs::path& path, int w, int h, std::uint64_t seed) {
  const Image mosaic = unpack_rggb(testing::textured_image(w / 2, h / 2, seed), CfaPattern::kRggb);
  MosaicImage m;
  m.width = w;
  m.height = h;
  m.meta = {64, 1023, 10, CfaPattern::kRggb};
  for (float v : mosaic.data) m.data.push_back(std::uint16_t(64 + std::lround(v * (1023 - 64))));
  save_mosaic(path, m);
}

double value_after(const std::string& text, const std::string& key) {
  const std::size_t pos = text.find(key + " = ");
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size() + 3));
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  testing::TempDir dir("cli");
  CHECK(cli(dir, "").code == 1);
  CHECK(cli(dir, "frobnicate").code == 1);
  CHECK(cli(dir, "degrade --bogus x").code == 1);
  CHECK(cli(dir, "evaluate").code == 1);
  CHECK(cli(dir, "--help").code == 0);
}

TEST_CASE("degrade writes a clean/degraded pair and a record, deterministically") {
  testing::TempDir dir("cli");
  write_mosaic(dir / "shot.pgm", 64, 48, 1);
  Run r = cli(dir, "degrade " + q(dir / "shot.pgm") + " -o " + q(dir / "a") + " --seed 7 --index 3");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "a_clean.praw"));
  CHECK(fs::exists(dir / "a_degraded.praw"));
  CHECK(fs::exists(dir / "a.record"));
  r = cli(dir, "degrade " + q(dir / "shot.pgm") + " -o " + q(dir / "b") + " --seed 7 --index 3");
  REQUIRE(r.code == 0);
  CHECK(read_file_bytes(dir / "a_degraded.praw") == read_file_bytes(dir / "b_degraded.praw"));
  CHECK(read_file_bytes(dir / "a.record") == read_file_bytes(dir / "b.record"));

  r = cli(dir, "replay " + q(dir / "a_clean.praw") + " " + q(dir / "a.record") + " " + q(dir / "c.praw"));
  REQUIRE(r.code == 0);
  CHECK(read_file_bytes(dir / "c.praw") == read_file_bytes(dir / "a_degraded.praw"));

  r = cli(dir, "degrade " + q(dir / "shot.pgm") + " -o " + q(dir / "d") + " --seed 8 --index 3");
  CHECK_FALSE(read_file_bytes(dir / "d_degraded.praw") == read_file_bytes(dir / "a_degraded.praw"));
}

TEST_CASE("degrade error codes") {
  testing::TempDir dir("cli");
  write_mosaic(dir / "shot.pgm", 32, 32, 2);
  write_text_file(dir / "shot.meta", "black_level = 64\nbit_depth = 10\ncfa = RGGB\n");
  Run r = cli(dir, "degrade " + q(dir / "shot.pgm") + " -o " + q(dir / "x"));
  CHECK(r.code == 3);
  CHECK(r.err.find("white_level") != std::string::npos);

  fs::remove(dir / "shot.meta");
  CHECK(cli(dir, "degrade " + q(dir / "shot.pgm") + " -o " + q(dir / "x")).code == 2);
  CHECK(cli(dir, "degrade " + q(dir / "nope.pgm") + " -o " + q(dir / "x")).code == 2);

  write_mosaic(dir / "ok.pgm", 32, 32, 2);
  write_text_file(dir / "bad.cfg", "[pipeline]\nscale = 3\n");
  CHECK(cli(dir, "degrade " + q(dir / "ok.pgm") + " -c " + q(dir / "bad.cfg") + " -o " + q(dir / "x")).code == 3);
  CHECK(cli(dir, "degrade " + q(dir / "ok.pgm") + " -c " + q(dir / "missing.cfg") + " -o " + q(dir / "x")).code == 2);
  CHECK(cli(dir, "degrade " + q(dir / "ok.pgm") + " --level IX -o " + q(dir / "x")).code == 3);
}

TEST_CASE("render of a constant image is a constant PPM") {
  testing::TempDir dir("cli");
  const float c[4] = {0.25f, 0.25f, 0.25f, 0.25f};
  write_praw(dir / "gray.praw", testing::constant_image(6, 4, c));
  write_text_file(dir / "isp.cfg", "[isp]\ngamma = none\n");
  REQUIRE(cli(dir, "render " + q(dir / "gray.praw") + " " + q(dir / "gray.ppm") + " -c " + q(dir / "isp.cfg")).code == 0);
  const Rgb8Image img = read_ppm(dir / "gray.ppm");
  CHECK(img.width == 12);
  CHECK(img.height == 8);
  for (std::uint8_t v : img.data) CHECK(v == 64);  // round(0.25 * 255) = 63.75 -> 64
}

TEST_CASE("synth-dataset and evaluate") {
  testing::TempDir dir("cli");
  fs::create_directories(dir / "in");
  for (int i = 0; i < 3; ++i) write_mosaic(dir / ("in/f" + std::to_string(i) + ".pgm"), 128, 128, 20 + i);
  write_text_file(dir / "run.cfg", "[pipeline]\nlevel = II\npatch_size = 32\npatch_stride = 32\n");
  Run r = cli(dir, "synth-dataset " + q(dir / "in") + " " + q(dir / "out1") + " -c " + q(dir / "run.cfg") + " --jobs 1");
  REQUIRE(r.code == 0);
  r = cli(dir, "synth-dataset " + q(dir / "in") + " " + q(dir / "out2") + " -c " + q(dir / "run.cfg"),
          "RAWFORGE_THREADS=3");
  REQUIRE(r.code == 0);
  const auto manifest = read_manifest(dir / "out1/manifest.tsv");
  CHECK(manifest.size() == 12);
  CHECK(read_file_bytes(dir / "out1/manifest.tsv") == read_file_bytes(dir / "out2/manifest.tsv"));
  for (const auto& e : manifest) CHECK(read_file_bytes(dir / "out1" / e.degraded_path) == read_file_bytes(dir / "out2" / e.degraded_path));

  // clean-vs-clean manifest
  std::string same;
  for (auto e : manifest) {
    e.degraded_path = e.clean_path;
    same += format_manifest_line(e) + "\n";
  }
  write_text_file(dir / "out1/same.tsv", same);
  r = cli(dir, "evaluate -m " + q(dir / "out1/same.tsv"));
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.starts_with("#") || line.starts_with("pair") || line.starts_with("std")) continue;
    CHECK(line.find("\tinf\t1.000000\tinf\t1.000000") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 13);  // 12 pairs + mean

  r = cli(dir, "evaluate --bicubic -m " + q(dir / "out1/manifest.tsv"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("inf") == std::string::npos);
  r = cli(dir, "evaluate -m " + q(dir / "out1/manifest.tsv"));
  CHECK(r.code == 3);

  fs::create_directories(dir / "empty");
  CHECK(cli(dir, "synth-dataset " + q(dir / "empty") + " " + q(dir / "out3")).code == 2);
  fs::create_directories(dir / "broken");
  write_text_file(dir / "broken/x.pgm", "P5\n4 4\n255\n");
  write_text_file(dir / "broken/x.meta", "black_level = 0\nwhite_level = 255\nbit_depth = 8\ncfa = RGGB\n");
  CHECK(cli(dir, "synth-dataset " + q(dir / "broken") + " " + q(dir / "out4")).code == 3);
}

TEST_CASE("estimate-noise recovers synthesized flat-field parameters within 5%") {
  testing::TempDir dir("cli");
  fs::create_directories(dir / "flats");
  const NoiseProfile truth{"t", 0.004, 0.0003};
  for (int i = 1; i <= 9; ++i) {
    const float v = float(i) / 10.0f;
    const float c[4] = {v, v, v, v};
    const Image flat = sample_shot_read(testing::constant_image(160, 160, c), truth, std::uint64_t(i), NoiseClamp::kNone);
    write_praw(dir / ("flats/flat" + std::to_string(i) + ".praw"), flat);
  }
  const Run r = cli(dir, "estimate-noise " + q(dir / "flats"));
  REQUIRE(r.code == 0);
  CHECK(std::abs(value_after(r.out, "lambda_s") - truth.lambda_shot) / truth.lambda_shot < 0.05);
  CHECK(std::abs(value_after(r.out, "lambda_r") - truth.lambda_read) / truth.lambda_read < 0.05);
  CHECK(cli(dir, "estimate-noise " + q(dir / "nothing")).code == 2);
}
