// rawforge: batch front end for RAW degradation, rendering and evaluation.
//
// Exit codes: 0 success, 1 usage error, 2 I/O error, 3 data-format error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rawforge/config.hpp"
#include "rawforge/dataset.hpp"
#include "rawforge/error.hpp"
#include "rawforge/io.hpp"
#include "rawforge/metrics.hpp"
#include "rawforge/noise.hpp"
#include "rawforge/photometric.hpp"
#include "rawforge/pipeline.hpp"
#include "rawforge/raw_core.hpp"

namespace fs = std::filesystem;
using namespace rawforge;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kFormat = 3 };

struct PipelineOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> level;
  std::optional<int> scale;
};

void add_pipeline_flags(CLI::App* cmd, PipelineOverrides& o) {
  cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
  cmd->add_option("--level", o.level, "Degradation level I, II, III or IV (overrides the config)");
  cmd->add_option("--scale", o.scale, "Downsampling factor 1, 2 or 4 (overrides the config)");
}

RunConfig load_run_config(const std::string& path, const PipelineOverrides& o = {}) {
  RunConfig cfg = path.empty() ? RunConfig{} : load_config(path);
  if (o.seed) cfg.degradation.seed = *o.seed;
  if (o.level) cfg.degradation.level = parse_level(*o.level);
  if (o.scale) cfg.degradation.scale = *o.scale;
  cfg.degradation.validate();
  return cfg;
}

int resolve_jobs(const std::optional<int>& flag) {
  if (flag) return std::max(*flag, 1);
  if (const char* env = std::getenv("RAWFORGE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

std::string fmt(double v, int precision) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

// ---- degrade ---------------------------------------------------------------

struct DegradeArgs {
  std::string input;
  std::string config;
  std::string output;
  std::uint64_t index = 0;
  PipelineOverrides overrides;
};

int run_degrade(const DegradeArgs& a) {
  const RunConfig cfg = load_run_config(a.config, a.overrides);
  const MosaicImage mosaic = load_mosaic(a.input);
  Image clean = pack_rggb(normalize_mosaic(mosaic), mosaic.meta.cfa);
  const int s = cfg.degradation.scale;
  if (clean.width % s != 0 || clean.height % s != 0) {
    clean = crop(clean, 0, 0, clean.width - clean.width % s, clean.height - clean.height % s);
  }
  const DegradationResult result = degrade(clean, cfg.degradation, a.index);
  write_praw(a.output + "_clean.praw", clean);
  write_praw(a.output + "_degraded.praw", result.degraded);
  write_text_file(a.output + ".record", result.record.serialize());
  std::cout << a.output << "_clean.praw\t" << a.output << "_degraded.praw\t" << digest_hex(result.record.digest())
            << "\n";
  return kOk;
}

// ---- replay ----------------------------------------------------------------

int run_replay(const std::string& clean_path, const std::string& record_path, const std::string& out_path) {
  const Image clean = read_praw(clean_path);
  const DegradationRecord rec = DegradationRecord::parse(read_text_file(record_path));
  write_praw(out_path, replay(clean, rec));
  return kOk;
}

// ---- synth-dataset -----------------------------------------------------------

struct SynthArgs {
  std::string input_dir;
  std::string output_dir;
  std::string config;
  std::optional<int> jobs;
  PipelineOverrides overrides;
};

int run_synth(const SynthArgs& a) {
  const RunConfig cfg = load_run_config(a.config, a.overrides);
  const DatasetReport report = synth_dataset(a.input_dir, a.output_dir, cfg.degradation, resolve_jobs(a.jobs));
  for (const auto& f : report.failures) std::cerr << "skipped " << f << "\n";
  std::cout << report.entries.size() << " pairs written to " << (fs::path(a.output_dir) / kManifestName).string()
            << "\n";
  if (report.entries.empty()) {
    std::cerr << "error: every input failed\n";
    return kFormat;
  }
  return kOk;
}

// ---- render ------------------------------------------------------------------

int run_render(const std::string& input, const std::string& output, const std::string& config) {
  const RunConfig cfg = load_run_config(config);
  write_ppm(output, render_rgb(read_praw(input), cfg.isp));
  return kOk;
}

// ---- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
  std::string manifest;
  std::vector<std::string> pair;
  std::string config;
  bool bicubic = false;
};

Image match_shape(const Image& clean, Image restored, bool bicubic) {
  if (clean.same_shape(restored) || !bicubic) return restored;
  if (restored.width == 0 || clean.width % restored.width != 0 || clean.height % restored.height != 0 ||
      clean.width / restored.width != clean.height / restored.height) {
    throw FormatError("restored image is not an integer downscale of the clean image");
  }
  return upsample_bicubic(restored, clean.width / restored.width);
}

int run_evaluate(const EvaluateArgs& a) {
  const RunConfig cfg = load_run_config(a.config);
  std::vector<std::pair<fs::path, fs::path>> pairs;
  if (!a.manifest.empty()) {
    const fs::path root = fs::path(a.manifest).parent_path();
    for (const auto& e : read_manifest(a.manifest)) pairs.emplace_back(root / e.clean_path, root / e.degraded_path);
  } else {
    pairs.emplace_back(a.pair[0], a.pair[1]);
  }

  std::cout << "# ssim: single-scale, 11x11 gaussian window, sigma 1.5\n";
  std::cout << "pair\tpsnr_raw\tssim_raw\tpsnr_rgb\tssim_rgb\n";
  std::vector<std::array<double, 4>> rows;
  for (const auto& [clean_path, restored_path] : pairs) {
    const Image clean = read_praw(clean_path);
    const Image restored = match_shape(clean, read_praw(restored_path), a.bicubic);
    const EvaluationReport r = evaluate_pair(clean, restored, cfg.isp);
    rows.push_back({r.psnr_raw, r.ssim_raw, r.psnr_rgb, r.ssim_rgb});
    std::cout << restored_path.filename().string() << '\t' << fmt(r.psnr_raw, 4) << '\t' << fmt(r.ssim_raw, 6) << '\t'
              << fmt(r.psnr_rgb, 4) << '\t' << fmt(r.ssim_rgb, 6) << "\n";
  }
  std::array<double, 4> mean{};
  std::array<double, 4> sd{};
  for (int k = 0; k < 4; ++k) {
    double sum = 0.0;
    for (const auto& row : rows) sum += row[k];
    mean[k] = sum / double(rows.size());
    if (std::isinf(mean[k])) {
      const bool all_inf = std::all_of(rows.begin(), rows.end(), [&](const auto& row) { return row[k] == mean[k]; });
      sd[k] = all_inf ? 0.0 : std::nan("");
      continue;
    }
    double ss = 0.0;
    for (const auto& row : rows) ss += (row[k] - mean[k]) * (row[k] - mean[k]);
    sd[k] = std::sqrt(ss / double(rows.size()));
  }
  std::cout << "mean\t" << fmt(mean[0], 4) << '\t' << fmt(mean[1], 6) << '\t' << fmt(mean[2], 4) << '\t'
            << fmt(mean[3], 6) << "\n";
  std::cout << "std\t" << fmt(sd[0], 4) << '\t' << fmt(sd[1], 6) << '\t' << fmt(sd[2], 4) << '\t' << fmt(sd[3], 6)
            << "\n";
  return kOk;
}

// ---- estimate-noise ------------------------------------------------------------

int run_estimate_noise(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("flat-frame directory '" + dir + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".praw" || ext == ".pgm")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no .praw or .pgm flat frames in '" + dir + "'");

  std::vector<MeanVariance> samples;
  std::cout << "frame\tchannel\tmean\tvariance\n";
  for (const auto& f : files) {
    Image flat;
    if (f.extension() == ".praw") {
      flat = read_praw(f);
    } else {
      const MosaicImage m = load_mosaic(f);
      flat = pack_rggb(normalize_mosaic(m), m.meta.cfa);
    }
    const auto stats = flat_field_stats(flat);
    for (std::size_t c = 0; c < stats.size(); ++c) {
      std::cout << f.filename().string() << '\t' << c << '\t' << fmt(stats[c].mean, 8) << '\t'
                << fmt(stats[c].variance, 10) << "\n";
      samples.push_back(stats[c]);
    }
  }
  const NoiseProfile p = estimate_profile(samples);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "lambda_s = %.9g\nlambda_r = %.9g\n", p.lambda_shot, p.lambda_read);
  std::cout << buf;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rawforge: RAW degradation synthesis, fixed-ISP rendering and evaluation"};
  app.require_subcommand(1);

  DegradeArgs degrade_args;
  auto* degrade_cmd = app.add_subcommand("degrade", "Degrade one mosaic (PGM + .meta) into a clean/degraded pair");
  degrade_cmd->add_option("input", degrade_args.input, "Input .pgm; <name>.meta must sit next to it")->required();
  degrade_cmd->add_option("-c,--config", degrade_args.config, "Configuration file");
  degrade_cmd->add_option("-o,--output", degrade_args.output, "Output prefix")->required();
  degrade_cmd->add_option("--index", degrade_args.index, "Image index for the random stream");
  add_pipeline_flags(degrade_cmd, degrade_args.overrides);

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth-dataset", "Build degraded-clean pairs for every .pgm in a directory");
  synth_cmd->add_option("input_dir", synth_args.input_dir)->required();
  synth_cmd->add_option("output_dir", synth_args.output_dir)->required();
  synth_cmd->add_option("-c,--config", synth_args.config, "Configuration file");
  synth_cmd->add_option("-j,--jobs", synth_args.jobs, "Worker threads (default: RAWFORGE_THREADS or 1)");
  add_pipeline_flags(synth_cmd, synth_args.overrides);

  std::string render_in, render_out, render_config;
  auto* render_cmd = app.add_subcommand("render", "Render a .praw through the fixed ISP to an 8-bit PPM");
  render_cmd->add_option("input", render_in)->required();
  render_cmd->add_option("output", render_out)->required();
  render_cmd->add_option("-c,--config", render_config, "Configuration file ([isp] section)");

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "PSNR/SSIM in RAW and RGB domains");
  auto* manifest_opt = eval_cmd->add_option("-m,--manifest", eval_args.manifest, "Manifest from synth-dataset");
  auto* pair_opt = eval_cmd->add_option("pair", eval_args.pair, "CLEAN.praw RESTORED.praw")->expected(2);
  manifest_opt->excludes(pair_opt);
  eval_cmd->add_option("-c,--config", eval_args.config, "Configuration file ([isp] section)");
  eval_cmd->add_flag("--bicubic", eval_args.bicubic, "Bicubic-upscale smaller restored images (baseline)");

  std::string flats_dir;
  auto* noise_cmd = app.add_subcommand("estimate-noise", "Fit shot/read noise parameters from flat frames");
  noise_cmd->add_option("flat_dir", flats_dir, "Directory of .praw or .pgm flat frames")->required();

  std::string replay_clean, replay_record, replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "Re-apply a degradation record to a clean .praw");
  replay_cmd->add_option("clean", replay_clean)->required();
  replay_cmd->add_option("record", replay_record)->required();
  replay_cmd->add_option("output", replay_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (degrade_cmd->parsed()) return run_degrade(degrade_args);
    if (synth_cmd->parsed()) return run_synth(synth_args);
    if (render_cmd->parsed()) return run_render(render_in, render_out, render_config);
    if (eval_cmd->parsed()) {
      if (eval_args.manifest.empty() && eval_args.pair.size() != 2) {
        std::cerr << "evaluate: give --manifest or CLEAN RESTORED\n";
        return kUsage;
      }
      return run_evaluate(eval_args);
    }
    if (noise_cmd->parsed()) return run_estimate_noise(flats_dir);
    if (replay_cmd->parsed()) return run_replay(replay_clean, replay_record, replay_out);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFormat;
  }
  return kUsage;
}
