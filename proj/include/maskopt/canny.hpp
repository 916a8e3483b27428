#pragma once

#include <vector>

#include "maskopt/image.hpp"

namespace maskopt {

struct CannyParams {
  double sigma = 1.4;
  double low = 0.1;
  double high = 0.2;
};

// Gaussian-smoothed Sobel gradient magnitude, in intensity units per pixel.
// Exposed so callers can check edge pixels against the low threshold.
std::vector<double> smoothed_gradient_magnitude(const Image& gray, double sigma);

// Edge map of a 1-channel image: Gaussian smoothing, Sobel gradients,
// non-maximum suppression along the quantized gradient direction, and
// hysteresis (8-connected) between `low` and `high`.
BinaryMask canny_edges(const Image& gray, const CannyParams& params = {});

}  // namespace maskopt
