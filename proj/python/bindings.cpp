#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "maskopt/canny.hpp"
#include "maskopt/distfield.hpp"
#include "maskopt/inpaint.hpp"
#include "maskopt/losses.hpp"
#include "maskopt/mask_pipeline.hpp"
#include "maskopt/metrics.hpp"
#include "maskopt/morphology.hpp"
#include "maskopt/synthgen.hpp"

namespace py = pybind11;
using namespace maskopt;

namespace {

using MaskArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

BinaryMask to_mask(const MaskArray& a) {
  if (a.ndim() != 2) throw py::value_error("mask must be 2-D");
  BinaryMask m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  const auto* p = a.data();
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = p[i] ? 1 : 0;
  return m;
}

py::array_t<bool> from_mask(const BinaryMask& m) {
  py::array_t<bool> out({m.height(), m.width()});
  auto* p = out.mutable_data();
  for (std::size_t i = 0; i < m.size(); ++i) p[i] = m[i] != 0;
  return out;
}

Image to_image(const FloatArray& a) {
  if (a.ndim() == 2) {
    return Image(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), 1,
                 std::vector<float>(a.data(), a.data() + a.size()));
  }
  if (a.ndim() == 3) {
    return Image(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                 static_cast<int>(a.shape(2)), std::vector<float>(a.data(), a.data() + a.size()));
  }
  throw py::value_error("image must be HxW or HxWxC");
}

py::array_t<float> from_image(const Image& img) {
  std::vector<py::ssize_t> shape{img.height(), img.width()};
  if (img.channels() == 3) shape.push_back(3);
  py::array_t<float> out(shape);
  std::memcpy(out.mutable_data(), img.data().data(), img.size() * sizeof(float));
  return out;
}

RealGrid to_grid(const DoubleArray& a) {
  if (a.ndim() != 2) throw py::value_error("field must be 2-D");
  RealGrid g(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::memcpy(g.data.data(), a.data(), g.data.size() * sizeof(double));
  return g;
}

py::array_t<double> from_grid(const RealGrid& g) {
  py::array_t<double> out({g.height, g.width});
  std::memcpy(out.mutable_data(), g.data.data(), g.data.size() * sizeof(double));
  return out;
}

SignedDistanceField raw_field(const DoubleArray& phi) { return {to_grid(phi), false, 1.0}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Signed distance fields, mask expansion, inpainting and image metrics.";

  py::register_exception<Error>(m, "MaskoptError", PyExc_ValueError);

  m.def("euclidean_distance_to",
        [](const MaskArray& mask) { return from_grid(euclidean_distance_to(to_mask(mask))); },
        py::arg("mask"));
  m.def(
      "signed_distance",
      [](const MaskArray& mask, bool normalize) {
        auto sdf = signed_distance(to_mask(mask));
        if (normalize) sdf = normalize_sdf(sdf);
        return py::make_tuple(from_grid(sdf.field), sdf.scale);
      },
      py::arg("mask"), py::arg("normalize") = false,
      "Returns (phi, scale); phi is negative inside the mask.");
  m.def("dilate", [](const MaskArray& mask, double r) { return from_mask(dilate(to_mask(mask), r)); },
        py::arg("mask"), py::arg("radius"));
  m.def("erode", [](const MaskArray& mask, double r) { return from_mask(erode(to_mask(mask), r)); },
        py::arg("mask"), py::arg("radius"));
  m.def("rescale_mask", [](const MaskArray& mask, int d) { return from_mask(rescale_mask(to_mask(mask), d)); },
        py::arg("mask"), py::arg("d"));

  m.def(
      "mask_expansion_loss",
      [](const DoubleArray& phi, const DoubleArray& soft, double alpha) {
        const auto r = mask_expansion_loss(raw_field(phi), SoftMask(to_grid(soft)), alpha);
        return py::make_tuple(r.value, from_grid(r.gradient));
      },
      py::arg("phi"), py::arg("soft_mask"), py::arg("alpha"));
  m.def(
      "optimize_soft_mask",
      [](const DoubleArray& phi, const DoubleArray& init, double alpha, int steps, double step_size) {
        return from_grid(
            optimize_soft_mask(raw_field(phi), SoftMask(to_grid(init)), alpha, steps, step_size).grid());
      },
      py::arg("phi"), py::arg("init"), py::arg("alpha"), py::arg("steps"), py::arg("step_size"));
  m.def(
      "expand_segment",
      [](const MaskArray& segment, double alpha, const std::string& units) {
        const auto ex = expand_segment(to_mask(segment), alpha, parse_alpha_units(units));
        return py::make_tuple(from_mask(ex.mask), ex.radius_px);
      },
      py::arg("segment"), py::arg("alpha"), py::arg("units") = "normalized",
      "Returns (expanded_mask, radius_px).");

  m.def(
      "inpaint",
      [](const FloatArray& image, const MaskArray& mask, const std::string& backend, int iterations,
         double dt, int window_radius) {
        InpaintRequest req;
        req.mask = to_mask(mask);
        req.masked_input = apply_mask(to_image(image), req.mask);
        req.backend = parse_backend(backend);
        req.diffusion.iterations = iterations;
        req.diffusion.dt = dt;
        req.fast_march.window_radius = window_radius;
        Image out;
        {
          py::gil_scoped_release release;
          out = inpaint(req);
        }
        return from_image(out);
      },
      py::arg("image"), py::arg("mask"), py::arg("backend") = "diffusion",
      py::arg("iterations") = 2000, py::arg("dt") = 0.2, py::arg("window_radius") = 5);

  m.def("psnr", [](const FloatArray& a, const FloatArray& b) { return psnr(to_image(a), to_image(b)); },
        py::arg("ref"), py::arg("test"));
  m.def("ssim", [](const FloatArray& a, const FloatArray& b) { return ssim(to_image(a), to_image(b)); },
        py::arg("ref"), py::arg("test"));
  m.def(
      "canny",
      [](const FloatArray& gray, double sigma, double low, double high) {
        return from_mask(canny_edges(to_image(gray), {sigma, low, high}));
      },
      py::arg("gray"), py::arg("sigma") = 1.4, py::arg("low") = 0.1, py::arg("high") = 0.2);

  m.def(
      "random_irregular_mask",
      [](int height, int width, double ratio, std::uint64_t seed) {
        return from_mask(random_irregular_mask({height, width}, ratio, seed));
      },
      py::arg("height"), py::arg("width"), py::arg("ratio"), py::arg("seed"));
  m.def(
      "procedural_scene",
      [](int height, int width, std::uint64_t seed) {
        const auto s = procedural_scene(height, width, seed);
        py::array_t<std::uint32_t> ids({height, width});
        std::memcpy(ids.mutable_data(), s.labels.ids().data(), s.labels.ids().size() * sizeof(std::uint32_t));
        return py::make_tuple(from_image(s.image), ids, s.labels.class_table());
      },
      py::arg("height"), py::arg("width"), py::arg("seed"),
      "Returns (image, segment_ids, {segment: class}).");
}
