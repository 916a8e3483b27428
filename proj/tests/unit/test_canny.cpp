#include <cmath>
#include <vector>

#include "doctest.h"
#include "maskopt/canny.hpp"
#include "oracles.hpp"

using namespace maskopt;

namespace {

// Direct 2-D Gaussian blur (clamped borders) followed by a central difference.
std::vector<double> brute_row_gradient(const Image& img, double sigma) {
  const int h = img.height(), w = img.width();
  const int r = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> s(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0, norm = 0;
      for (int i = -r; i <= r; ++i) {
        for (int j = -r; j <= r; ++j) {
          const double wt = std::exp(-(i * i + j * j) / (2 * sigma * sigma));
          acc += wt * img.at(std::clamp(y + i, 0, h - 1), std::clamp(x + j, 0, w - 1));
          norm += wt;
        }
      }
      s[static_cast<std::size_t>(y) * w + x] = acc / norm;
    }
  }
  std::vector<double> g(s.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double l = s[static_cast<std::size_t>(y) * w + std::max(x - 1, 0)];
      const double rr = s[static_cast<std::size_t>(y) * w + std::min(x + 1, w - 1)];
      g[static_cast<std::size_t>(y) * w + x] = std::abs(rr - l);
    }
  }
  return g;
}

Image step_image(int h, int w, int step) {
  Image img(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = step; x < w; ++x) img.at(y, x) = 1.0f;
  }
  return img;
}

}  // namespace

TEST_CASE("constant image has no edges") {
  CHECK(canny_edges(Image(16, 16, 1, 0.4f)).count() == 0);
}

TEST_CASE("vertical step gives one band at the per-row gradient maximum") {
  const Image img = step_image(16, 20, 10);
  const auto g = brute_row_gradient(img, 1.0);
  const BinaryMask e = canny_edges(img, {1.0, 0.1, 0.2});
  for (int y = 0; y < 16; ++y) {
    int arg = 0;
    double best = -1;
    for (int x = 0; x < 20; ++x) {
      if (g[static_cast<std::size_t>(y) * 20 + x] > best + 1e-9) {
        best = g[static_cast<std::size_t>(y) * 20 + x];
        arg = x;
      }
    }
    for (int x = 0; x < 20; ++x) CHECK(e.at(y, x) == (x == arg ? 1 : 0));
  }
}

TEST_CASE("inversion leaves edges unchanged") {
  Rng rng(5);
  Image img(24, 24, 1);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 24; ++x) img.at(y, x) = (x > 8 && y > 6 && x < 18) ? 0.9f : 0.1f;
  }
  for (auto& v : img.data()) v += static_cast<float>(rng.uniform(-0.02, 0.02));
  Image inv = img;
  for (auto& v : inv.data()) v = 1.0f - v;
  CHECK(canny_edges(img) == canny_edges(inv));
  CHECK(canny_edges(img).any());
}

TEST_CASE("canny argument errors") {
  CHECK_THROWS_AS(canny_edges(Image(4, 4, 3)), Error);
  CHECK_THROWS_AS(canny_edges(Image(4, 4, 1), {0.0, 0.1, 0.2}), Error);
  CHECK_THROWS_AS(canny_edges(Image(4, 4, 1), {1.0, 0.3, 0.2}), Error);
}
