#include "maskopt/inpaint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "maskopt/distfield.hpp"

namespace maskopt {
namespace {

void validate(const InpaintRequest& req) {
  require_same_extents(req.masked_input.extents(), req.mask.extents(), "inpaint");
  if (!req.mask.any()) fail(ErrorKind::InputShape, "inpaint: mask is empty");
  if (req.mask.all()) fail(ErrorKind::InputShape, "inpaint: mask covers the whole image");
}

}  // namespace

Backend parse_backend(const std::string& name) {
  if (name == "diffusion") return Backend::Diffusion;
  if (name == "fmm") return Backend::FastMarch;
  fail(ErrorKind::Config, "unknown backend '" + name + "' (expected diffusion or fmm)");
}

std::string to_string(Backend backend) {
  return backend == Backend::Diffusion ? "diffusion" : "fmm";
}

Image inpaint_diffusion(const InpaintRequest& req) {
  validate(req);
  const auto& p = req.diffusion;
  if (p.iterations < 1) fail(ErrorKind::Parameter, "inpaint_diffusion: iterations must be >= 1");
  if (!(p.dt > 0.0 && p.dt <= 0.25)) {
    fail(ErrorKind::Parameter, "inpaint_diffusion: dt must lie in (0, 0.25]");
  }

  const int h = req.mask.height();
  const int w = req.mask.width();
  const int c = req.masked_input.channels();
  Image out = req.masked_input;
  auto img = out.data();

  std::vector<std::size_t> holes;
  std::vector<std::size_t> neighbors;  // 4 per hole; self index at the border
  std::vector<double> ring_sum(c, 0.0);
  std::size_t ring_count = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (req.mask[i]) {
        holes.push_back(i);
        neighbors.push_back(y > 0 ? i - w : i);
        neighbors.push_back(y + 1 < h ? i + w : i);
        neighbors.push_back(x > 0 ? i - 1 : i);
        neighbors.push_back(x + 1 < w ? i + 1 : i);
        continue;
      }
      const bool borders_hole = (y > 0 && req.mask[i - w]) || (y + 1 < h && req.mask[i + w]) ||
                                (x > 0 && req.mask[i - 1]) || (x + 1 < w && req.mask[i + 1]);
      if (borders_hole) {
        for (int k = 0; k < c; ++k) ring_sum[k] += img[i * c + k];
        ++ring_count;
      }
    }
  }
  for (std::size_t i : holes) {
    for (int k = 0; k < c; ++k) img[i * c + k] = static_cast<float>(ring_sum[k] / ring_count);
  }

  const float dt = static_cast<float>(p.dt);
  std::vector<float> next(holes.size() * c);
  for (int it = 0; it < p.iterations; ++it) {
    float max_change = 0.0f;
    for (std::size_t k = 0; k < holes.size(); ++k) {
      const std::size_t* nb = neighbors.data() + 4 * k;
      for (int ch = 0; ch < c; ++ch) {
        const float v = img[holes[k] * c + ch];
        const float lap = (img[nb[0] * c + ch] - v) + (img[nb[1] * c + ch] - v) +
                          (img[nb[2] * c + ch] - v) + (img[nb[3] * c + ch] - v);
        const float nv = v + dt * lap;
        next[k * c + ch] = nv;
        max_change = std::max(max_change, std::abs(nv - v));
      }
    }
    for (std::size_t k = 0; k < holes.size(); ++k) {
      for (int ch = 0; ch < c; ++ch) img[holes[k] * c + ch] = next[k * c + ch];
    }
    if (max_change < p.tolerance) break;
  }
  return out;
}

std::vector<std::size_t> fast_march_order(const BinaryMask& mask) {
  const RealGrid dist = euclidean_distance_to(mask.complement());
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dist.data[a] < dist.data[b];
  });
  return order;
}

Image inpaint_fast_march(const InpaintRequest& req) {
  validate(req);
  const int radius = req.fast_march.window_radius;
  if (radius < 1) fail(ErrorKind::Parameter, "inpaint_fast_march: window_radius must be >= 1");

  const int h = req.mask.height();
  const int w = req.mask.width();
  const int c = req.masked_input.channels();
  const RealGrid dist = euclidean_distance_to(req.mask.complement());
  const auto order = fast_march_order(req.mask);

  Image out = req.masked_input;
  auto img = out.data();
  std::vector<std::uint8_t> known(req.mask.size());
  for (std::size_t i = 0; i < known.size(); ++i) known[i] = req.mask[i] ? 0 : 1;

  auto T = [&](int y, int x) {
    return dist.at(std::clamp(y, 0, h - 1), std::clamp(x, 0, w - 1));
  };
  std::vector<double> acc(c);
  for (std::size_t i : order) {
    const int y = static_cast<int>(i / w);
    const int x = static_cast<int>(i % w);
    const double ty = 0.5 * (T(y + 1, x) - T(y - 1, x));
    const double tx = 0.5 * (T(y, x + 1) - T(y, x - 1));
    const double tnorm = std::hypot(ty, tx);
    const double tp = dist.at(y, x);

    std::fill(acc.begin(), acc.end(), 0.0);
    double total = 0.0;
    for (int qy = std::max(0, y - radius); qy <= std::min(h - 1, y + radius); ++qy) {
      for (int qx = std::max(0, x - radius); qx <= std::min(w - 1, x + radius); ++qx) {
        const std::size_t j = static_cast<std::size_t>(qy) * w + qx;
        if (!known[j]) continue;
        const double dy = y - qy;
        const double dx = x - qx;
        const double d2 = dy * dy + dx * dx;
        const double len = std::sqrt(d2);
        double dir = tnorm > 0.0 ? std::abs(dy * ty + dx * tx) / (len * tnorm) : 1.0;
        dir = std::max(dir, 0.01);
        const double level = 1.0 / (1.0 + std::abs(tp - dist.data[j]));
        const double weight = dir * level / d2;
        for (int k = 0; k < c; ++k) acc[k] += weight * img[j * c + k];
        total += weight;
      }
    }
    // Some 8-neighbor is strictly closer to the known region, so total > 0.
    for (int k = 0; k < c; ++k) img[i * c + k] = static_cast<float>(acc[k] / total);
    known[i] = 1;
  }
  return out;
}

Image inpaint(const InpaintRequest& req) {
  return req.backend == Backend::Diffusion ? inpaint_diffusion(req) : inpaint_fast_march(req);
}

}  // namespace maskopt
