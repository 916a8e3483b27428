#include "maskopt/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "json.hpp"
#include "maskopt/image_io.hpp"
#include "maskopt/parallel.hpp"
#include "maskopt/rng.hpp"

namespace maskopt {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

float quantize8(double v) {
  const double q = std::nearbyint(std::clamp(v, 0.0, 1.0) * 255.0);
  return static_cast<float>(q) / 255.0f;
}

struct Wave {
  double ky, kx, phase, amp;
  double weight[3];
};

void paint_background(Image& img, Rng& rng) {
  const int h = img.height();
  const int w = img.width();
  double base[3], gy[3], gx[3];
  for (int k = 0; k < 3; ++k) {
    base[k] = rng.uniform(0.25, 0.75);
    gy[k] = rng.uniform(-0.15, 0.15);
    gx[k] = rng.uniform(-0.15, 0.15);
  }
  std::vector<Wave> waves(3);
  for (auto& wv : waves) {
    const double wavelength = rng.uniform(6.0, 24.0);
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const double k = 2.0 * std::numbers::pi / wavelength;
    wv.ky = k * std::sin(theta);
    wv.kx = k * std::cos(theta);
    wv.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    wv.amp = rng.uniform(0.03, 0.08);
    for (double& c : wv.weight) c = rng.uniform(0.5, 1.0);
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double fy = static_cast<double>(y) / h - 0.5;
      const double fx = static_cast<double>(x) / w - 0.5;
      for (int k = 0; k < 3; ++k) {
        double v = base[k] + gy[k] * fy + gx[k] * fx;
        for (const auto& wv : waves) {
          v += wv.weight[k] * wv.amp * std::sin(wv.ky * y + wv.kx * x + wv.phase);
        }
        v += rng.uniform(-0.015, 0.015);
        img.at(y, x, k) = static_cast<float>(v);
      }
    }
  }
}

void random_color(Rng& rng, double out[3]) {
  const auto hot = rng.integer(0, 2);
  for (int k = 0; k < 3; ++k) out[k] = k == hot ? rng.uniform(0.75, 1.0) : rng.uniform(0.0, 0.3);
}

// Writes `id` over an ellipse or rectangle.
void draw_clutter(Image& img, std::vector<std::uint32_t>& ids, std::uint32_t id, Rng& rng) {
  const int h = img.height();
  const int w = img.width();
  const double cy = rng.uniform(0, h);
  const double cx = rng.uniform(0, w);
  const double ry = rng.uniform(4, 14);
  const double rx = rng.uniform(4, 14);
  const bool ellipse = rng.bernoulli(0.5);
  double color[3];
  random_color(rng, color);
  for (int y = std::max(0, int(cy - ry)); y <= std::min(h - 1, int(cy + ry)); ++y) {
    for (int x = std::max(0, int(cx - rx)); x <= std::min(w - 1, int(cx + rx)); ++x) {
      const double dy = (y - cy) / ry;
      const double dx = (x - cx) / rx;
      if (ellipse && dy * dy + dx * dx > 1.0) continue;
      ids[static_cast<std::size_t>(y) * w + x] = id;
      for (int k = 0; k < 3; ++k) img.at(y, x, k) = static_cast<float>(color[k]);
    }
  }
}

void draw_hero(Image& img, std::vector<std::uint32_t>& ids, Rng& rng) {
  const int h = img.height();
  const int w = img.width();
  const double target = rng.uniform(1.0, 45.0) / 100.0;
  const double r0 = std::sqrt(target * h * w / std::numbers::pi);
  double amp[3], phase[3];
  double wobble = 0.0;
  for (int k = 0; k < 3; ++k) {
    amp[k] = rng.uniform(0.0, 0.12);
    phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    wobble += amp[k];
  }
  const double rmax = r0 * (1.0 + wobble);
  auto center = [&](int extent) {
    const double lo = std::min(rmax, extent / 2.0);
    const double hi = std::max(extent - 1 - rmax, extent / 2.0);
    return rng.uniform(lo, hi);
  };
  const double cy = center(h);
  const double cx = center(w);
  double color[3];
  random_color(rng, color);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dy = y - cy;
      const double dx = x - cx;
      const double theta = std::atan2(dy, dx);
      double radius = r0;
      for (int k = 0; k < 3; ++k) radius += r0 * amp[k] * std::cos((k + 2) * theta + phase[k]);
      const double rho = std::hypot(dy, dx) / radius;
      if (rho > 1.0) continue;
      ids[static_cast<std::size_t>(y) * w + x] = 1;
      const double shade = 0.85 + 0.15 * (1.0 - rho);
      for (int k = 0; k < 3; ++k) img.at(y, x, k) = static_cast<float>(color[k] * shade);
    }
  }
}

std::size_t placed_count(const Extents& ext, const BinaryMask& m, int row, int col) {
  std::size_t n = 0;
  for (int y = std::max(0, -row); y < m.height() && row + y < ext.height; ++y) {
    for (int x = std::max(0, -col); x < m.width() && col + x < ext.width; ++x) n += m.at(y, x);
  }
  return n;
}

void stamp_disk(BinaryMask& m, double cy, double cx, double radius) {
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
  const int y1 = std::min(m.height() - 1, static_cast<int>(std::ceil(cy + radius)));
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
  const int x1 = std::min(m.width() - 1, static_cast<int>(std::ceil(cx + radius)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if ((y - cy) * (y - cy) + (x - cx) * (x - cx) <= radius * radius) m.at(y, x) = 1;
    }
  }
}

}  // namespace

std::vector<ObjectCutout> extract_objects(const Image& img, const LabelMap& labels,
                                          int class_filter) {
  require_same_extents(img.extents(), labels.extents(), "extract_objects");
  struct Box {
    int y0 = INT32_MAX, x0 = INT32_MAX, y1 = -1, x1 = -1;
  };
  std::map<std::uint32_t, Box> boxes;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto id = labels.at(y, x);
      auto it = labels.class_table().find(id);
      if (it == labels.class_table().end() || it->second != class_filter) continue;
      auto& b = boxes[id];
      b.y0 = std::min(b.y0, y);
      b.x0 = std::min(b.x0, x);
      b.y1 = std::max(b.y1, y);
      b.x1 = std::max(b.x1, x);
    }
  }
  std::vector<ObjectCutout> out;
  for (const auto& [id, b] : boxes) {
    ObjectCutout cut;
    cut.class_id = class_filter;
    cut.source_segment = id;
    const int bh = b.y1 - b.y0 + 1;
    const int bw = b.x1 - b.x0 + 1;
    cut.patch = Image(bh, bw, img.channels());
    cut.mask = BinaryMask(bh, bw);
    for (int y = 0; y < bh; ++y) {
      for (int x = 0; x < bw; ++x) {
        for (int k = 0; k < img.channels(); ++k) cut.patch.at(y, x, k) = img.at(b.y0 + y, b.x0 + x, k);
        cut.mask.at(y, x) = labels.at(b.y0 + y, b.x0 + x) == id ? 1 : 0;
      }
    }
    out.push_back(std::move(cut));
  }
  return out;
}

SampleTriplet superimpose(const Image& bg, const ObjectCutout& obj, int row, int col,
                          std::uint64_t seed) {
  require_same_extents(obj.patch.extents(), obj.mask.extents(), "superimpose");
  if (obj.patch.channels() != bg.channels()) {
    fail(ErrorKind::InputShape, "superimpose: channel mismatch");
  }
  SampleTriplet t;
  t.ground_truth = bg;
  t.input = bg;
  t.mask = BinaryMask(bg.extents());
  t.seed = seed;
  t.row = row;
  t.col = col;
  std::size_t placed = 0;
  for (int y = 0; y < obj.mask.height(); ++y) {
    const int ty = row + y;
    if (ty < 0 || ty >= bg.height()) continue;
    for (int x = 0; x < obj.mask.width(); ++x) {
      const int tx = col + x;
      if (tx < 0 || tx >= bg.width() || !obj.mask.at(y, x)) continue;
      t.mask.at(ty, tx) = 1;
      for (int k = 0; k < bg.channels(); ++k) t.input.at(ty, tx, k) = obj.patch.at(y, x, k);
      ++placed;
    }
  }
  if (placed == 0) fail(ErrorKind::Placement, "superimpose: placement clips the whole object");
  t.clipped = placed < obj.mask.count();
  t.mask_ratio = mask_ratio(t.mask);
  return t;
}

SceneSource procedural_scene(int height, int width, std::uint64_t seed) {
  if (height < 16 || width < 16) fail(ErrorKind::Parameter, "procedural_scene: extents too small");
  Rng rng(seed);
  Image img(height, width, 3);
  paint_background(img, rng);
  std::vector<std::uint32_t> ids(img.extents().pixels(), 0);
  const auto clutter = rng.integer(2, 4);
  for (std::int64_t c = 0; c < clutter; ++c) draw_clutter(img, ids, static_cast<std::uint32_t>(2 + c), rng);
  draw_hero(img, ids, rng);

  // Compact clutter ids that survived the hero.
  std::map<std::uint32_t, std::uint32_t> remap{{0, 0}, {1, 1}};
  for (auto id : ids) {
    if (!remap.count(id)) remap[id] = 0;
  }
  std::uint32_t next = 2;
  for (auto& [from, to] : remap) {
    if (from >= 2) to = next++;
  }
  SceneSource s;
  s.labels = LabelMap(height, width);
  for (std::size_t i = 0; i < ids.size(); ++i) s.labels.ids()[i] = remap[ids[i]];
  s.labels.class_table()[0] = 0;
  s.labels.class_table()[1] = 1;
  for (std::uint32_t id = 2; id < next; ++id) s.labels.class_table()[id] = 2;
  for (auto& v : img.data()) v = quantize8(v);
  s.image = std::move(img);
  return s;
}

std::vector<SceneSource> procedural_corpus(int height, int width, std::size_t count,
                                           std::uint64_t seed) {
  std::vector<SceneSource> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(procedural_scene(height, width, mix_seed(seed, i)));
  return out;
}

std::vector<SampleTriplet> generate_samples(const std::vector<SceneSource>& sources,
                                            std::size_t n, const std::vector<MaskBin>& bins,
                                            std::uint64_t seed,
                                            const GenerationOptions& options) {
  if (n == 0) return {};
  if (bins.empty()) fail(ErrorKind::Parameter, "generate_samples: no bins");
  if (sources.empty()) fail(ErrorKind::Generation, "generate_samples: no sources");
  const Extents ext = sources.front().image.extents();
  struct Candidate {
    std::size_t source;
    ObjectCutout cut;
    double full_ratio;
  };
  std::vector<Candidate> candidates;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (sources[s].image.extents() != ext) {
      fail(ErrorKind::InputShape, "generate_samples: sources differ in extents");
    }
    for (auto& cut : extract_objects(sources[s].image, sources[s].labels, options.class_filter)) {
      const double r = 100.0 * static_cast<double>(cut.mask.count()) / static_cast<double>(ext.pixels());
      candidates.push_back({s, std::move(cut), r});
    }
  }
  if (candidates.empty()) fail(ErrorKind::Generation, "generate_samples: no usable object");

  std::vector<SampleTriplet> out(n);
  parallel_for(n, options.jobs, [&](std::size_t i) {
    const MaskBin& bin = bins[i % bins.size()];
    const double floor_ratio = std::max(bin.lo, options.min_ratio);
    std::vector<std::size_t> pool;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (candidates[c].full_ratio >= floor_ratio) pool.push_back(c);
    }
    const std::uint64_t sample_seed = seed + i;
    Rng rng(sample_seed);
    for (int attempt = 0; attempt < options.max_attempts && !pool.empty(); ++attempt) {
      const auto bg = static_cast<std::size_t>(rng.integer(0, std::ssize(sources) - 1));
      const auto& cand = candidates[pool[rng.integer(0, std::ssize(pool) - 1)]];
      const int cy = static_cast<int>(rng.integer(0, ext.height - 1));
      const int cx = static_cast<int>(rng.integer(0, ext.width - 1));
      const int row = cy - cand.cut.mask.height() / 2;
      const int col = cx - cand.cut.mask.width() / 2;
      const double ratio = 100.0 * static_cast<double>(placed_count(ext, cand.cut.mask, row, col)) /
                           static_cast<double>(ext.pixels());
      if (!bin.contains(ratio) || ratio < options.min_ratio) continue;
      SampleTriplet t = superimpose(sources[bg].image, cand.cut, row, col, sample_seed);
      t.background_source = bg;
      t.object_source = cand.source;
      t.object_segment = cand.cut.source_segment;
      out[i] = std::move(t);
      return;
    }
    fail(ErrorKind::Generation, "generate_samples: quota for bin " + bin.label() +
                                    " not met within " + std::to_string(options.max_attempts) +
                                    " attempts (sample " + std::to_string(i) + ")");
  });
  return out;
}

std::string sample_id(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return buf;
}

void write_dataset(const fs::path& dir, const std::vector<SampleTriplet>& samples,
                   const std::vector<MaskBin>& bins, std::uint64_t seed) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  json manifest;
  manifest["seed"] = seed;
  manifest["count"] = samples.size();
  manifest["bins"] = json::array();
  for (const auto& b : bins) manifest["bins"].push_back({b.lo, b.hi});
  manifest["samples"] = json::array();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& t = samples[i];
    const std::string id = sample_id(i);
    io::save_image(dir / (id + "_input.png"), t.input);
    io::save_image(dir / (id + "_gt.png"), t.ground_truth);
    io::save_mask(dir / (id + "_mask.png"), t.mask);
    const auto bin = find_bin(bins, t.mask_ratio);
    manifest["samples"].push_back({
        {"id", id},
        {"input", id + "_input.png"},
        {"ground_truth", id + "_gt.png"},
        {"mask", id + "_mask.png"},
        {"seed", t.seed},
        {"mask_ratio", t.mask_ratio},
        {"bin", bin ? bin->label() : ""},
        {"background_source", t.background_source},
        {"object_source", t.object_source},
        {"object_segment", t.object_segment},
        {"location", {t.row, t.col}},
        {"clipped", t.clipped},
    });
  }
  std::ofstream f(dir / "manifest.json", std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot write " + (dir / "manifest.json").string());
  f << manifest.dump(2) << "\n";
}

std::vector<LoadedSample> load_dataset(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  std::ifstream f(path);
  if (!f) fail(ErrorKind::Io, "dataset manifest not found: " + path.string());
  json manifest;
  try {
    manifest = json::parse(f);
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, "bad manifest " + path.string() + ": " + e.what());
  }
  std::vector<LoadedSample> out;
  try {
    for (const auto& e : manifest.at("samples")) {
      LoadedSample s;
      s.id = e.at("id").get<std::string>();
      s.bin = e.at("bin").get<std::string>();
      auto& t = s.triplet;
      t.input = io::load_image(dir / e.at("input").get<std::string>());
      t.ground_truth = io::load_image(dir / e.at("ground_truth").get<std::string>());
      t.mask = io::load_mask(dir / e.at("mask").get<std::string>());
      t.seed = e.at("seed").get<std::uint64_t>();
      t.background_source = e.value("background_source", std::size_t{0});
      t.object_source = e.value("object_source", std::size_t{0});
      t.object_segment = e.value("object_segment", 0u);
      t.clipped = e.value("clipped", false);
      if (e.contains("location")) {
        t.row = e["location"].at(0).get<int>();
        t.col = e["location"].at(1).get<int>();
      }
      require_same_extents(t.input.extents(), t.ground_truth.extents(), "load_dataset");
      require_same_extents(t.input.extents(), t.mask.extents(), "load_dataset");
      if (!t.mask.any()) fail(ErrorKind::InputShape, "load_dataset: empty mask for " + s.id);
      t.mask_ratio = mask_ratio(t.mask);
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, "bad manifest entry in " + path.string() + ": " + e.what());
  }
  return out;
}

void generate_dataset(const std::vector<SceneSource>& sources, std::size_t n,
                      const std::vector<MaskBin>& bins, std::uint64_t seed, const fs::path& dir,
                      const GenerationOptions& options) {
  write_dataset(dir, generate_samples(sources, n, bins, seed, options), bins, seed);
}

BinaryMask random_irregular_mask(Extents extents, double target_ratio, std::uint64_t seed) {
  if (!(target_ratio > 0.0 && target_ratio < 100.0)) {
    fail(ErrorKind::Parameter, "random_irregular_mask: target ratio must lie in (0, 100)");
  }
  if (extents.pixels() == 0) fail(ErrorKind::InputShape, "random_irregular_mask: empty extents");
  constexpr double kTolerance = 2.0;
  constexpr int kMaxStrokes = 5000;
  Rng rng(seed);
  const double side = std::min(extents.height, extents.width);
  double scale = 1.0;  // shrinks after each overshoot
  BinaryMask mask(extents);
  for (int stroke = 0; stroke < kMaxStrokes; ++stroke) {
    if (mask_ratio(mask) >= target_ratio - kTolerance / 2) return mask;
    BinaryMask next = mask;
    const double radius = std::max(0.5, scale * rng.uniform(side / 64.0, side / 16.0));
    double y = rng.uniform(0, extents.height - 1);
    double x = rng.uniform(0, extents.width - 1);
    double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const auto vertices = rng.integer(2, 8);
    for (std::int64_t v = 0; v < vertices; ++v) {
      angle += rng.uniform(-std::numbers::pi / 2, std::numbers::pi / 2);
      const double len = std::max(1.0, scale * rng.uniform(0.05, 0.25) * side);
      const double ny = std::clamp(y + len * std::sin(angle), 0.0, extents.height - 1.0);
      const double nx = std::clamp(x + len * std::cos(angle), 0.0, extents.width - 1.0);
      const int steps = static_cast<int>(std::ceil(std::hypot(ny - y, nx - x))) + 1;
      for (int s = 0; s <= steps; ++s) {
        const double f = static_cast<double>(s) / steps;
        stamp_disk(next, y + f * (ny - y), x + f * (nx - x), radius);
      }
      y = ny;
      x = nx;
    }
    if (mask_ratio(next) > target_ratio + kTolerance) {
      scale *= 0.7;
      continue;
    }
    mask = std::move(next);
  }
  if (std::abs(mask_ratio(mask) - target_ratio) <= kTolerance) return mask;
  fail(ErrorKind::Generation, "random_irregular_mask: target ratio not reached");
}

}  // namespace maskopt
