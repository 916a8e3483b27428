#include "maskopt/distfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace maskopt {
namespace {

constexpr double kFar = 1e20;

// Squared distance transform of a sampled function along one line
// (Felzenszwalb & Huttenlocher lower envelope). `f`, `out` have stride `step`.
void transform_line(const double* f, double* out, int n, std::size_t step,
                    std::vector<int>& v, std::vector<double>& z,
                    std::vector<double>& tmp) {
  auto F = [&](int q) { return f[q * step]; };
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  auto intersect = [&](int q, int p) {
    return ((F(q) + double(q) * q) - (F(p) + double(p) * p)) / (2.0 * q - 2.0 * p);
  };
  for (int q = 1; q < n; ++q) {
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    tmp[q] = dq * dq + F(v[k]);
  }
  for (int q = 0; q < n; ++q) out[q * step] = tmp[q];
}

}  // namespace

RealGrid squared_distance_to(const BinaryMask& mask) {
  const int h = mask.height();
  const int w = mask.width();
  RealGrid g(h, w);
  for (std::size_t i = 0; i < mask.size(); ++i) g.data[i] = mask[i] ? 0.0 : kFar;

  const int n = std::max(h, w);
  std::vector<int> v(n + 1);
  std::vector<double> z(n + 2);
  std::vector<double> tmp(n);
  for (int x = 0; x < w; ++x) {
    double* col = g.data.data() + x;
    transform_line(col, col, h, static_cast<std::size_t>(w), v, z, tmp);
  }
  for (int y = 0; y < h; ++y) {
    double* row = g.data.data() + static_cast<std::size_t>(y) * w;
    transform_line(row, row, w, 1, v, z, tmp);
  }
  return g;
}

RealGrid euclidean_distance_to(const BinaryMask& mask) {
  if (!mask.any()) fail(ErrorKind::Domain, "euclidean_distance_to: empty mask");
  RealGrid g = squared_distance_to(mask);
  for (auto& d : g.data) d = std::sqrt(d);
  return g;
}

SignedDistanceField signed_distance(const BinaryMask& mask) {
  if (!mask.any()) fail(ErrorKind::Domain, "signed_distance: empty mask");
  if (mask.all()) fail(ErrorKind::Domain, "signed_distance: full mask");
  const RealGrid outside = squared_distance_to(mask);
  const RealGrid inside = squared_distance_to(mask.complement());
  SignedDistanceField sdf;
  sdf.field = RealGrid(mask.height(), mask.width());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    sdf.field.data[i] = mask[i] ? -std::sqrt(inside.data[i]) : std::sqrt(outside.data[i]);
  }
  return sdf;
}

SignedDistanceField normalize_sdf(const SignedDistanceField& sdf) {
  if (sdf.normalized) fail(ErrorKind::Domain, "normalize_sdf: field is already normalized");
  double peak = 0.0;
  for (double d : sdf.field.data) peak = std::max(peak, std::abs(d));
  if (!(peak > 0.0)) fail(ErrorKind::Domain, "normalize_sdf: all-zero field");
  SignedDistanceField out = sdf;
  for (auto& d : out.field.data) d /= peak;
  out.normalized = true;
  out.scale = peak;
  return out;
}

BinaryMask offset_region(const SignedDistanceField& sdf, double alpha) {
  BinaryMask out(sdf.field.height, sdf.field.width);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sdf.field.data[i] < alpha ? 1 : 0;
  return out;
}

Image render_offset_map(const SignedDistanceField& sdf, double alpha) {
  if (!sdf.normalized) fail(ErrorKind::Domain, "render_offset_map: field must be normalized");
  if (!(alpha >= 0.0)) fail(ErrorKind::Parameter, "render_offset_map: alpha must be >= 0");
  Image out(sdf.field.height, sdf.field.width, 1);
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double v = 0.5 * (sdf.field.data[i] - alpha + 1.0);
    dst[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return out;
}

BinaryMask inner_contour(const BinaryMask& region) {
  const int h = region.height();
  const int w = region.width();
  BinaryMask out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!region.at(y, x)) continue;
      const bool edge = (y > 0 && !region.at(y - 1, x)) || (y + 1 < h && !region.at(y + 1, x)) ||
                        (x > 0 && !region.at(y, x - 1)) || (x + 1 < w && !region.at(y, x + 1));
      out.at(y, x) = edge ? 1 : 0;
    }
  }
  return out;
}

Image render_contour_overlay(const SignedDistanceField& sdf, double alpha) {
  const Image gray = render_offset_map(sdf, alpha);
  const BinaryMask contour = inner_contour(offset_region(sdf, alpha));
  Image out(gray.height(), gray.width(), 3);
  auto src = gray.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const bool c = contour[i] != 0;
    dst[3 * i] = c ? 1.0f : src[i];
    dst[3 * i + 1] = c ? 0.0f : src[i];
    dst[3 * i + 2] = c ? 0.0f : src[i];
  }
  return out;
}

}  // namespace maskopt
