#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "rawforge/config.hpp"
#include "rawforge/error.hpp"
#include "rawforge/io.hpp"
#include "rawforge/isp.hpp"
#include "rawforge/kernels.hpp"
#include "rawforge/metrics.hpp"
#include "rawforge/noise.hpp"
#include "rawforge/photometric.hpp"
#include "rawforge/pipeline.hpp"
#include "rawforge/raw_core.hpp"

namespace py = pybind11;
using namespace rawforge;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

// (H, W) or (H, W, C) float32 -> Image.
Image to_image(const FloatArray& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw InvalidArgument("expected a 2-D or 3-D array");
  const int h = int(a.shape(0));
  const int w = int(a.shape(1));
  const int c = a.ndim() == 3 ? int(a.shape(2)) : 1;
  Image img(w, h, c);
  std::memcpy(img.data.data(), a.data(), img.data.size() * sizeof(float));
  return img;
}

py::array_t<float> to_array(const Image& img) {
  std::vector<py::ssize_t> shape{img.height, img.width};
  if (img.channels != 1) shape.push_back(img.channels);
  py::array_t<float> out(shape);
  std::memcpy(out.mutable_data(), img.data.data(), img.data.size() * sizeof(float));
  return out;
}

py::array_t<std::uint8_t> to_array(const Rgb8Image& img) {
  py::array_t<std::uint8_t> out({py::ssize_t(img.height), py::ssize_t(img.width), py::ssize_t(3)});
  std::memcpy(out.mutable_data(), img.data.data(), img.data.size());
  return out;
}

Rgb8Image to_rgb8(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw InvalidArgument("expected an (H, W, 3) uint8 array");
  Rgb8Image img{int(a.shape(1)), int(a.shape(0)), std::vector<std::uint8_t>(std::size_t(a.size()))};
  std::memcpy(img.data.data(), a.data(), img.data.size());
  return img;
}

py::array_t<double> kernel_array(const Kernel& k) {
  py::array_t<double> out({py::ssize_t(k.size), py::ssize_t(k.size)});
  std::memcpy(out.mutable_data(), k.weights.data(), k.weights.size() * sizeof(double));
  return out;
}

Kernel to_kernel(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw InvalidArgument("kernel must be a square 2-D array");
  Kernel k;
  k.size = int(a.shape(0));
  k.weights.assign(a.data(), a.data() + a.size());
  k.validate();
  return k;
}

MosaicImage to_mosaic(const py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>& a,
                      const SensorMeta& meta) {
  if (a.ndim() != 2) throw InvalidArgument("mosaic must be a 2-D uint16 array");
  MosaicImage m;
  m.height = int(a.shape(0));
  m.width = int(a.shape(1));
  m.meta = meta;
  m.data.assign(a.data(), a.data() + a.size());
  return m;
}

DegradationConfig make_config(const std::string& level, int scale, std::uint64_t seed, const std::string& config_path) {
  DegradationConfig cfg = config_path.empty() ? DegradationConfig{} : load_config(config_path).degradation;
  if (!level.empty()) cfg.level = parse_level(level);
  if (scale > 0) cfg.scale = scale;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "RAW degradation synthesis, fixed-ISP rendering and metrics";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());

  py::class_<SensorMeta>(m, "SensorMeta")
      .def(py::init([](int black, int white, int bits, const std::string& cfa) {
             SensorMeta meta{black, white, bits, parse_cfa(cfa)};
             meta.validate();
             return meta;
           }),
           py::arg("black_level") = 0, py::arg("white_level") = 65535, py::arg("bit_depth") = 16,
           py::arg("cfa") = "RGGB")
      .def_readwrite("black_level", &SensorMeta::black_level)
      .def_readwrite("white_level", &SensorMeta::white_level)
      .def_readwrite("bit_depth", &SensorMeta::bit_depth)
      .def_property_readonly("cfa", [](const SensorMeta& s) { return std::string(to_string(s.cfa)); });

  m.def(
      "normalize",
      [](const py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>& mosaic, const SensorMeta& meta) {
        return to_array(normalize_mosaic(to_mosaic(mosaic, meta)));
      },
      py::arg("mosaic"), py::arg("meta"), "uint16 mosaic -> float32 in [0, 1]");
  m.def(
      "pack",
      [](const FloatArray& mosaic, const std::string& cfa) { return to_array(pack_rggb(to_image(mosaic), parse_cfa(cfa))); },
      py::arg("mosaic"), py::arg("cfa") = "RGGB", "(H, W) mosaic -> (H/2, W/2, 4) in R, G1, G2, B order");
  m.def(
      "unpack",
      [](const FloatArray& packed, const std::string& cfa) { return to_array(unpack_rggb(to_image(packed), parse_cfa(cfa))); },
      py::arg("packed"), py::arg("cfa") = "RGGB");
  m.def(
      "extract_patches",
      [](const FloatArray& packed, int size, int stride) {
        py::list out;
        for (const Image& p : extract_patches(to_image(packed), size, stride)) out.append(to_array(p));
        return out;
      },
      py::arg("packed"), py::arg("size") = kDefaultPatchSize, py::arg("stride") = kDefaultPatchSize);

  m.def("gaussian_kernel", [](double sx, double sy, double theta, int size) {
    return kernel_array(gaussian_kernel(sx, sy, theta, size ? size : default_gaussian_size(std::max(sx, sy))));
  }, py::arg("sigma_x"), py::arg("sigma_y"), py::arg("theta") = 0.0, py::arg("size") = 0);
  m.def("disk_kernel", [](double r, int size) {
    return kernel_array(disk_kernel(r, size ? size : default_disk_size(r)));
  }, py::arg("radius"), py::arg("size") = 0);
  m.def("motion_kernel", [](double length, double angle, int size) {
    return kernel_array(motion_kernel(length, angle, size ? size : default_motion_size(length)));
  }, py::arg("length"), py::arg("angle"), py::arg("size") = 0);
  m.def("load_psf", [](const std::string& path) { return kernel_array(load_psf(path)); }, py::arg("path"));
  m.def(
      "convolve",
      [](const FloatArray& img, const py::array_t<double, py::array::c_style | py::array::forcecast>& k) {
        return to_array(convolve(to_image(img), to_kernel(k)));
      },
      py::arg("image"), py::arg("kernel"));

  m.def(
      "add_noise",
      [](const FloatArray& img, double lambda_shot, double lambda_read, std::uint64_t seed, bool clamp) {
        return to_array(sample_shot_read(to_image(img), {"custom", lambda_shot, lambda_read}, seed,
                                         clamp ? NoiseClamp::kClamp : NoiseClamp::kNone));
      },
      py::arg("image"), py::arg("lambda_shot"), py::arg("lambda_read"), py::arg("seed"), py::arg("clamp") = true);
  m.def(
      "estimate_noise",
      [](const std::vector<std::pair<double, double>>& mean_variance) {
        std::vector<MeanVariance> s;
        for (const auto& [mean, var] : mean_variance) s.push_back({mean, var});
        const NoiseProfile p = estimate_profile(s);
        return py::make_tuple(p.lambda_shot, p.lambda_read);
      },
      py::arg("mean_variance"), "[(mean, variance), ...] -> (lambda_shot, lambda_read)");

  m.def("exposure", [](const FloatArray& img, double f) { return to_array(exposure_scale(to_image(img), f)); },
        py::arg("image"), py::arg("factor"));
  m.def(
      "downsample",
      [](const FloatArray& img, int s, const std::string& filter) {
        return to_array(downsample(to_image(img), s, parse_filter(filter)));
      },
      py::arg("image"), py::arg("scale"), py::arg("filter") = "bicubic");
  m.def("upsample_bicubic", [](const FloatArray& img, int s) { return to_array(upsample_bicubic(to_image(img), s)); },
        py::arg("image"), py::arg("scale"));

  m.def(
      "degrade",
      [](const FloatArray& clean, const std::string& level, int scale, std::uint64_t seed, std::uint64_t index,
         const std::string& config) {
        const DegradationResult r = degrade(to_image(clean), make_config(level, scale, seed, config), index);
        return py::make_tuple(to_array(r.degraded), r.record.serialize());
      },
      py::arg("clean"), py::arg("level") = "", py::arg("scale") = 0, py::arg("seed") = 0, py::arg("index") = 0,
      py::arg("config") = "", "Returns (degraded, record_text). Empty level/scale keep the config values.");
  m.def(
      "replay",
      [](const FloatArray& clean, const std::string& record) {
        return to_array(replay(to_image(clean), DegradationRecord::parse(record)));
      },
      py::arg("clean"), py::arg("record"));
  m.def("record_digest", [](const std::string& record) { return digest_hex(DegradationRecord::parse(record).digest()); },
        py::arg("record"));

  m.def(
      "render",
      [](const FloatArray& packed, const std::string& config) {
        const IspParams isp = config.empty() ? IspParams{} : load_config(config).isp;
        return to_array(render_rgb(to_image(packed), isp));
      },
      py::arg("packed"), py::arg("config") = "", "Packed RAW -> (2H, 2W, 3) uint8 through the fixed ISP");

  m.def("psnr", [](const FloatArray& a, const FloatArray& b, double peak) { return psnr(to_image(a), to_image(b), peak); },
        py::arg("a"), py::arg("b"), py::arg("peak") = 1.0);
  m.def(
      "ssim",
      [](const FloatArray& a, const FloatArray& b, double data_range) { return ssim(to_image(a), to_image(b), data_range); },
      py::arg("a"), py::arg("b"), py::arg("data_range") = 1.0);
  m.def(
      "ssim_rgb8",
      [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a,
         const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& b) {
        return ssim(to_rgb8(a), to_rgb8(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "evaluate_pair",
      [](const FloatArray& clean, const FloatArray& restored, const std::string& config) {
        const IspParams isp = config.empty() ? IspParams{} : load_config(config).isp;
        const EvaluationReport r = evaluate_pair(to_image(clean), to_image(restored), isp);
        py::dict d;
        d["psnr_raw"] = r.psnr_raw;
        d["ssim_raw"] = r.ssim_raw;
        d["psnr_rgb"] = r.psnr_rgb;
        d["ssim_rgb"] = r.ssim_rgb;
        return d;
      },
      py::arg("clean"), py::arg("restored"), py::arg("config") = "");

  m.def("read_praw", [](const std::string& path) { return to_array(read_praw(path)); }, py::arg("path"));
  m.def("write_praw", [](const std::string& path, const FloatArray& img) { write_praw(path, to_image(img)); },
        py::arg("path"), py::arg("image"));
  m.def(
      "load_mosaic",
      [](const std::string& path) {
        const MosaicImage mosaic = load_mosaic(path);
        py::array_t<std::uint16_t> out({py::ssize_t(mosaic.height), py::ssize_t(mosaic.width)});
        std::memcpy(out.mutable_data(), mosaic.data.data(), mosaic.data.size() * sizeof(std::uint16_t));
        return py::make_tuple(out, mosaic.meta);
      },
      py::arg("path"), "PGM + .meta sidecar -> (uint16 array, SensorMeta)");
  m.def(
      "save_mosaic",
      [](const std::string& path, const py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>& a,
         const SensorMeta& meta) { save_mosaic(path, to_mosaic(a, meta)); },
      py::arg("path"), py::arg("mosaic"), py::arg("meta"));
}
