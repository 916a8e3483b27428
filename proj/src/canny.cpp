#include "maskopt/canny.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

namespace maskopt {
namespace {

constexpr double kTie = 1e-9;

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Separable convolution with clamped borders.
std::vector<double> blur(const Image& gray, double sigma) {
  const int h = gray.height();
  const int w = gray.width();
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  std::vector<double> tmp(static_cast<std::size_t>(h) * w);
  std::vector<double> out(tmp.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        acc += k[i + r] * gray.at(y, std::clamp(x + i, 0, w - 1));
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        acc += k[i + r] * tmp[static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x];
      }
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  return out;
}

struct Gradients {
  std::vector<double> gx, gy, mag;
};

Gradients sobel(const std::vector<double>& s, int h, int w) {
  Gradients g;
  g.gx.resize(s.size());
  g.gy.resize(s.size());
  g.mag.resize(s.size());
  auto at = [&](int y, int x) {
    return s[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Divided by 8 so a unit ramp has unit gradient.
      const double gx = ((at(y - 1, x + 1) + 2 * at(y, x + 1) + at(y + 1, x + 1)) -
                         (at(y - 1, x - 1) + 2 * at(y, x - 1) + at(y + 1, x - 1))) / 8.0;
      const double gy = ((at(y + 1, x - 1) + 2 * at(y + 1, x) + at(y + 1, x + 1)) -
                         (at(y - 1, x - 1) + 2 * at(y - 1, x) + at(y - 1, x + 1))) / 8.0;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      g.gx[i] = gx;
      g.gy[i] = gy;
      g.mag[i] = std::hypot(gx, gy);
    }
  }
  return g;
}

void check_input(const Image& gray) {
  if (gray.channels() != 1) {
    fail(ErrorKind::InputShape, "canny: expected a 1-channel image");
  }
}

}  // namespace

std::vector<double> smoothed_gradient_magnitude(const Image& gray, double sigma) {
  check_input(gray);
  if (!(sigma > 0)) fail(ErrorKind::Parameter, "canny: sigma must be positive");
  return sobel(blur(gray, sigma), gray.height(), gray.width()).mag;
}

BinaryMask canny_edges(const Image& gray, const CannyParams& params) {
  check_input(gray);
  if (!(params.sigma > 0)) fail(ErrorKind::Parameter, "canny: sigma must be positive");
  if (!(params.low > 0 && params.low < params.high)) {
    fail(ErrorKind::Parameter, "canny: thresholds must satisfy 0 < low < high");
  }
  const int h = gray.height();
  const int w = gray.width();
  BinaryMask edges(h, w);
  if (h == 0 || w == 0) return edges;

  const Gradients g = sobel(blur(gray, params.sigma), h, w);
  auto mag = [&](int y, int x) {
    if (y < 0 || y >= h || x < 0 || x >= w) return 0.0;
    return g.mag[static_cast<std::size_t>(y) * w + x];
  };

  // 0 = weak candidate, 1 = strong, -1 = suppressed.
  std::vector<int> state(g.mag.size(), -1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double m = g.mag[i];
      if (m < params.low) continue;
      double angle = std::atan2(g.gy[i], g.gx[i]) * 180.0 / std::numbers::pi;
      if (angle < 0) angle += 180.0;
      int dy = 0, dx = 0;
      if (angle < 22.5 || angle >= 157.5) {
        dx = 1;
      } else if (angle < 67.5) {
        dy = 1, dx = 1;
      } else if (angle < 112.5) {
        dy = 1;
      } else {
        dy = 1, dx = -1;
      }
      // Strict on the backward side, inclusive on the forward side: plateaus of
      // two equal maxima keep exactly the first one. kTie absorbs rounding
      // differences so that inverting the image selects the same pixels.
      if (m > mag(y - dy, x - dx) + kTie && m >= mag(y + dy, x + dx) - kTie) {
        state[i] = m >= params.high ? 1 : 0;
      }
    }
  }

  std::deque<std::size_t> frontier;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] == 1) {
      edges[i] = 1;
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    const int y = static_cast<int>(i / w);
    const int x = static_cast<int>(i % w);
    for (int oy = -1; oy <= 1; ++oy) {
      for (int ox = -1; ox <= 1; ++ox) {
        const int ny = y + oy, nx = x + ox;
        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
        if (state[j] == 0 && !edges[j]) {
          edges[j] = 1;
          frontier.push_back(j);
        }
      }
    }
  }
  return edges;
}

}  // namespace maskopt
