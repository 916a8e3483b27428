#pragma once

#include <vector>

#include "maskopt/image.hpp"

namespace maskopt {

// H x W grid of doubles.
struct RealGrid {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  RealGrid() = default;
  RealGrid(int h, int w, double value = 0.0)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w, value) {}

  Extents extents() const { return {height, width}; }
  double& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }
  double at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }
};

// Negative inside the mask, positive outside. When `normalized` is set the
// values were divided by `scale` (the largest absolute pixel distance).
struct SignedDistanceField {
  RealGrid field;
  bool normalized = false;
  double scale = 1.0;

  Extents extents() const { return field.extents(); }
  // Converts a threshold in this field's units to pixels.
  double to_pixels(double value) const { return normalized ? value * scale : value; }
};

// Exact squared Euclidean distance from every pixel center to the nearest
// set pixel (lower envelope of parabolas, separable). Integer-valued.
RealGrid squared_distance_to(const BinaryMask& mask);

// sqrt of squared_distance_to. Throws Domain on an empty mask.
RealGrid euclidean_distance_to(const BinaryMask& mask);

// phi(p) = +dist to nearest mask pixel outside the mask,
//          -dist to nearest non-mask pixel inside it.
// With this convention {phi <= r} is exactly the disk dilation by r.
SignedDistanceField signed_distance(const BinaryMask& mask);

SignedDistanceField normalize_sdf(const SignedDistanceField& sdf);

// {p : phi(p) < alpha}, alpha in the field's own units.
BinaryMask offset_region(const SignedDistanceField& sdf, double alpha);

// Grayscale render of (phi - alpha): [-1,1] maps linearly onto [0,1], so the
// zero level set sits at 0.5. Requires a normalized field.
Image render_offset_map(const SignedDistanceField& sdf, double alpha);

// RGB copy of render_offset_map with the zero contour (inner boundary of
// offset_region) drawn in red.
Image render_contour_overlay(const SignedDistanceField& sdf, double alpha);

// 4-connected inner boundary of a region.
BinaryMask inner_contour(const BinaryMask& region);

}  // namespace maskopt
