#include "maskopt/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "maskopt/distfield.hpp"
#include "maskopt/image_io.hpp"
#include "maskopt/morphology.hpp"
#include "maskopt/parallel.hpp"
#include "maskopt/rng.hpp"

namespace maskopt {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail(ErrorKind::Config, where + ": expected an object");
  for (const auto& item : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; })) {
      fail(ErrorKind::Config, where + ": unknown key '" + item.key() + "'");
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, where + "." + key + ": " + e.what());
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot write " + path.string());
  return f;
}

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string bin_of(const Suite& suite, double ratio) {
  const auto b = find_bin(suite.bins, ratio);
  return b ? b->label() : "none";
}

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
  BinaryMask out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] | b[i];
  return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<MetricsRecord> flatten(std::vector<std::vector<MetricsRecord>>& per_sample) {
  std::vector<MetricsRecord> out;
  for (auto& v : per_sample) {
    for (auto& r : v) out.push_back(std::move(r));
  }
  return out;
}

// Means per condition over all bins.
AggregateTable aggregate_all_bins(std::vector<MetricsRecord> records) {
  for (auto& r : records) r.bin = "all";
  return aggregate(records, {"all"});
}

Image hconcat(const std::vector<Image>& images, int gap) {
  int h = 0, w = -gap;
  for (const auto& im : images) {
    h = std::max(h, im.height());
    w += im.width() + gap;
  }
  Image out(h, w, 3, 1.0f);
  int x0 = 0;
  for (const auto& im : images) {
    for (int y = 0; y < im.height(); ++y) {
      for (int x = 0; x < im.width(); ++x) {
        for (int k = 0; k < 3; ++k) out.at(y, x0 + x, k) = im.at(y, x, im.channels() == 3 ? k : 0);
      }
    }
    x0 += im.width() + gap;
  }
  return out;
}

Image inpaint_hole(const ExperimentConfig& cfg, const Image& input, const BinaryMask& hole) {
  InpaintRequest req;
  req.masked_input = apply_mask(input, hole);
  req.mask = hole;
  req.backend = cfg.backend;
  req.diffusion = cfg.diffusion;
  req.fast_march = cfg.fast_march;
  return inpaint(req);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (d_values.empty()) fail(ErrorKind::Config, "d_values must not be empty");
  if (alpha_values.empty()) fail(ErrorKind::Config, "alpha_values must not be empty");
  for (double a : alpha_values) {
    if (!(a >= 0.0)) fail(ErrorKind::Config, "alpha values must be >= 0");
  }
  for (double a : render_alphas) {
    if (!(a >= 0.0)) fail(ErrorKind::Config, "render alphas must be >= 0");
  }
  if (jobs < 1) fail(ErrorKind::Config, "jobs must be >= 1");
  if (generation.height < 16 || generation.width < 16) {
    fail(ErrorKind::Config, "generation extents must be at least 16x16");
  }
  if (generation.bins.empty()) fail(ErrorKind::Config, "generation.bins must not be empty");
  for (const auto& b : generation.bins) {
    if (!(b.lo >= 0.0 && b.hi > b.lo && b.hi <= 100.0)) {
      fail(ErrorKind::Config, "bad bin " + b.label());
    }
  }
  if (generation.sources < 1) fail(ErrorKind::Config, "generation.sources must be >= 1");
  if (perturbation.max_erosion < 0) fail(ErrorKind::Config, "perturbation.max_erosion must be >= 0");
  if (!(perturbation.flip_prob >= 0.0 && perturbation.flip_prob <= 1.0)) {
    fail(ErrorKind::Config, "perturbation.flip_prob must lie in [0,1]");
  }
  if (!(diffusion.dt > 0.0 && diffusion.dt <= 0.25) || diffusion.iterations < 1) {
    fail(ErrorKind::Config, "diffusion needs iterations >= 1 and dt in (0, 0.25]");
  }
  if (fast_march.window_radius < 1) fail(ErrorKind::Config, "fmm.window_radius must be >= 1");
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  check_keys(j,
             {"dataset", "generation", "backend", "diffusion", "fmm", "d_values", "alpha_values",
              "render_alphas", "render_sample", "seed", "out", "loss_weights", "masked_only",
              "segment_id", "alpha_units", "perturbation", "jobs"},
             "config");
  std::string s;
  if (j.contains("dataset")) {
    read(j, "dataset", s, "config");
    cfg.dataset = s;
  }
  if (j.contains("out")) {
    read(j, "out", s, "config");
    cfg.out = s;
  }
  if (j.contains("backend")) {
    read(j, "backend", s, "config");
    cfg.backend = parse_backend(s);
  }
  if (j.contains("alpha_units")) {
    read(j, "alpha_units", s, "config");
    cfg.alpha_units = parse_alpha_units(s);
  }
  read(j, "d_values", cfg.d_values, "config");
  read(j, "alpha_values", cfg.alpha_values, "config");
  read(j, "render_alphas", cfg.render_alphas, "config");
  read(j, "render_sample", cfg.render_sample, "config");
  read(j, "seed", cfg.seed, "config");
  read(j, "masked_only", cfg.masked_only, "config");
  read(j, "jobs", cfg.jobs, "config");
  if (j.contains("segment_id") && !j["segment_id"].is_null()) {
    std::uint32_t id = 0;
    read(j, "segment_id", id, "config");
    cfg.segment_id = id;
  }
  if (j.contains("loss_weights")) {
    try {
      cfg.loss_weights = j["loss_weights"].get<LossWeights>();
    } catch (const json::exception& e) {
      fail(ErrorKind::Config, std::string("config.loss_weights: ") + e.what());
    }
  }
  if (j.contains("diffusion")) {
    const auto& d = j["diffusion"];
    check_keys(d, {"iterations", "dt", "tolerance"}, "config.diffusion");
    read(d, "iterations", cfg.diffusion.iterations, "config.diffusion");
    read(d, "dt", cfg.diffusion.dt, "config.diffusion");
    read(d, "tolerance", cfg.diffusion.tolerance, "config.diffusion");
  }
  if (j.contains("fmm")) {
    const auto& f = j["fmm"];
    check_keys(f, {"window_radius"}, "config.fmm");
    read(f, "window_radius", cfg.fast_march.window_radius, "config.fmm");
  }
  if (j.contains("perturbation")) {
    const auto& p = j["perturbation"];
    check_keys(p, {"max_erosion", "flip_prob", "band"}, "config.perturbation");
    read(p, "max_erosion", cfg.perturbation.max_erosion, "config.perturbation");
    read(p, "flip_prob", cfg.perturbation.flip_prob, "config.perturbation");
    read(p, "band", cfg.perturbation.band, "config.perturbation");
  }
  if (j.contains("generation")) {
    const auto& g = j["generation"];
    check_keys(g, {"height", "width", "n", "sources", "bins", "class_filter", "max_attempts", "min_ratio"},
               "config.generation");
    auto& gen = cfg.generation;
    read(g, "height", gen.height, "config.generation");
    read(g, "width", gen.width, "config.generation");
    read(g, "n", gen.n, "config.generation");
    read(g, "sources", gen.sources, "config.generation");
    read(g, "class_filter", gen.options.class_filter, "config.generation");
    read(g, "max_attempts", gen.options.max_attempts, "config.generation");
    read(g, "min_ratio", gen.options.min_ratio, "config.generation");
    if (g.contains("bins")) {
      std::vector<std::pair<double, double>> bins;
      read(g, "bins", bins, "config.generation");
      gen.bins.clear();
      for (auto [lo, hi] : bins) gen.bins.push_back({lo, hi});
    }
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json bins = json::array();
  for (const auto& b : cfg.generation.bins) bins.push_back({b.lo, b.hi});
  return {
      {"dataset", cfg.dataset.string()},
      {"generation",
       {{"height", cfg.generation.height},
        {"width", cfg.generation.width},
        {"n", cfg.generation.n},
        {"sources", cfg.generation.sources},
        {"bins", bins},
        {"class_filter", cfg.generation.options.class_filter},
        {"max_attempts", cfg.generation.options.max_attempts},
        {"min_ratio", cfg.generation.options.min_ratio}}},
      {"backend", to_string(cfg.backend)},
      {"diffusion",
       {{"iterations", cfg.diffusion.iterations},
        {"dt", cfg.diffusion.dt},
        {"tolerance", cfg.diffusion.tolerance}}},
      {"fmm", {{"window_radius", cfg.fast_march.window_radius}}},
      {"d_values", cfg.d_values},
      {"alpha_values", cfg.alpha_values},
      {"render_alphas", cfg.render_alphas},
      {"render_sample", cfg.render_sample},
      {"seed", cfg.seed},
      {"out", cfg.out.string()},
      {"loss_weights", cfg.loss_weights},
      {"masked_only", cfg.masked_only},
      {"segment_id", cfg.segment_id ? json(*cfg.segment_id) : json(nullptr)},
      {"alpha_units", cfg.alpha_units == AlphaUnits::Pixels ? "pixels" : "normalized"},
      {"perturbation",
       {{"max_erosion", cfg.perturbation.max_erosion},
        {"flip_prob", cfg.perturbation.flip_prob},
        {"band", cfg.perturbation.band}}},
  };
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::Config, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, "bad config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::vector<std::string> Suite::bin_labels() const {
  std::vector<std::string> out;
  for (const auto& b : bins) out.push_back(b.label());
  return out;
}

Suite generate_suite(const ExperimentConfig& cfg) {
  const auto& g = cfg.generation;
  Suite suite;
  suite.bins = g.bins;
  suite.sources = procedural_corpus(g.height, g.width, g.sources, cfg.seed);
  GenerationOptions opts = g.options;
  opts.jobs = cfg.jobs;
  suite.samples = generate_samples(suite.sources, g.n, g.bins, cfg.seed, opts);
  for (std::size_t i = 0; i < suite.samples.size(); ++i) suite.ids.push_back(sample_id(i));
  return suite;
}

Suite prepare_suite(const ExperimentConfig& cfg) {
  if (cfg.dataset.empty()) return generate_suite(cfg);
  Suite suite;
  suite.bins = cfg.generation.bins;
  for (auto& s : load_dataset(cfg.dataset)) {
    suite.ids.push_back(s.id);
    suite.samples.push_back(std::move(s.triplet));
  }
  if (suite.samples.empty()) fail(ErrorKind::Io, "dataset " + cfg.dataset.string() + " is empty");
  return suite;
}

std::string d_condition(int d) {
  return d > 0 ? "d=+" + std::to_string(d) : "d=" + std::to_string(d);
}

std::string alpha_condition(double alpha) { return "alpha=" + format_g(alpha); }

MetricsRecord evaluate_hole(const ExperimentConfig& cfg, const SampleTriplet& t,
                            const Image& input, const BinaryMask& hole, const std::string& id,
                            const std::string& bin, const std::string& condition) {
  const Image result = inpaint_hole(cfg, input, hole);
  MetricsRecord r;
  r.sample_id = id;
  r.mask_ratio = t.mask_ratio;
  r.bin = bin;
  r.condition = condition;
  if (cfg.masked_only) {
    const BinaryMask region = mask_union(hole, t.mask);
    r.psnr = psnr_masked(t.ground_truth, result, region);
    r.ssim = ssim_masked(t.ground_truth, result, region);
  } else {
    r.psnr = psnr(t.ground_truth, result);
    r.ssim = ssim(t.ground_truth, result);
  }
  r.coverage = coverage_stats(hole, t.mask);
  return r;
}

SweepResult run_dilation_sweep(const ExperimentConfig& cfg, const Suite& suite) {
  cfg.validate();
  const std::size_t n = suite.samples.size();
  std::vector<std::vector<MetricsRecord>> per_sample(n);
  std::vector<std::uint8_t> excluded(n, 0);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    const auto& t = suite.samples[i];
    std::vector<BinaryMask> holes;
    try {
      for (int d : cfg.d_values) holes.push_back(rescale_mask(t.mask, d));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateMask) throw;
      excluded[i] = 1;
      return;
    }
    const std::string bin = bin_of(suite, t.mask_ratio);
    for (std::size_t k = 0; k < holes.size(); ++k) {
      per_sample[i].push_back(
          evaluate_hole(cfg, t, t.input, holes[k], suite.ids[i], bin, d_condition(cfg.d_values[k])));
    }
  });
  SweepResult res;
  res.records = flatten(per_sample);
  if (res.records.empty()) {
    fail(ErrorKind::Sweep, "dilation sweep: every sample degenerates for some d");
  }
  res.table = aggregate(res.records, suite.bin_labels());

  json& s = res.summary;
  s["backend"] = to_string(cfg.backend);
  s["samples"] = n;
  s["excluded"] = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    if (excluded[i]) s["excluded"].push_back(suite.ids[i]);
  }
  std::vector<int> nonneg;
  for (int d : cfg.d_values) {
    if (d >= 0) nonneg.push_back(d);
  }
  std::sort(nonneg.begin(), nonneg.end());
  const bool has_core = std::count(cfg.d_values.begin(), cfg.d_values.end(), 0) &&
                        std::count(cfg.d_values.begin(), cfg.d_values.end(), -2) &&
                        std::count(cfg.d_values.begin(), cfg.d_values.end(), 2);
  s["bins"] = json::object();
  for (const auto& bin : res.table.bins) {
    json b;
    json psnr_by_d = json::object();
    std::map<int, double> p;
    for (int d : cfg.d_values) {
      const auto* c = res.table.find(d_condition(d), bin);
      if (!c) continue;
      p[d] = c->psnr_mean;
      psnr_by_d[d_condition(d)] = number_or_null(c->psnr_mean);
    }
    if (p.empty()) continue;
    b["psnr"] = psnr_by_d;
    if (has_core && p.count(0) && p.count(-2) && p.count(2)) {
      const double erode_drop = p[0] - p[-2];
      const double dilate_drop = p[0] - p[2];
      b["erosion_drop"] = number_or_null(erode_drop);
      b["dilation_drop"] = number_or_null(dilate_drop);
      b["asymmetric"] = erode_drop > dilate_drop;
    }
    int inversions = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < nonneg.size(); ++k) {
      if (!p.count(nonneg[k]) || !p.count(nonneg[k + 1])) continue;
      const double rise = p[nonneg[k + 1]] - p[nonneg[k]];
      if (rise > 0.0) {
        ++inversions;
        worst = std::max(worst, rise);
      }
    }
    b["inversions"] = inversions;
    b["max_inversion_db"] = worst;
    b["near_monotone"] = inversions == 0 || (inversions == 1 && worst <= 0.1);
    s["bins"][bin] = b;
  }
  return res;
}

BinaryMask perturb_segment(const BinaryMask& target, const PerturbationSpec& spec,
                           std::uint64_t seed) {
  if (!target.any()) fail(ErrorKind::Domain, "perturb_segment: empty target");
  Rng rng(seed);
  int e = static_cast<int>(rng.integer(0, spec.max_erosion));
  BinaryMask seg = erode(target, e);
  while (!seg.any() && e > 0) seg = erode(target, --e);
  if (spec.flip_prob <= 0.0 || spec.band <= 0.0) return seg;
  const BinaryMask outer = dilate(seg, spec.band);
  const BinaryMask inner = erode(seg, spec.band);
  BinaryMask out = seg;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (outer[i] && !inner[i] && rng.bernoulli(spec.flip_prob)) out[i] ^= 1;
  }
  return out.any() ? out : seg;
}

SweepResult run_alpha_sweep(const ExperimentConfig& cfg, const Suite& suite) {
  cfg.validate();
  const std::size_t n = suite.samples.size();
  std::vector<std::vector<MetricsRecord>> per_sample(n);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    const auto& t = suite.samples[i];
    const BinaryMask seg = perturb_segment(t.mask, cfg.perturbation, mix_seed(t.seed, 1));
    LabelMap labels(t.mask.height(), t.mask.width());
    for (std::size_t p = 0; p < seg.size(); ++p) labels.ids()[p] = seg[p];
    labels.class_table() = {{0, 0}, {1, 1}};
    const std::string bin = bin_of(suite, t.mask_ratio);
    for (double a : cfg.alpha_values) {
      const Expansion ex = expand_for_inpainting(labels, t.mask, a, cfg.alpha_units, cfg.segment_id);
      per_sample[i].push_back(
          evaluate_hole(cfg, t, t.input, ex.mask, suite.ids[i], bin, alpha_condition(a)));
    }
  });
  SweepResult res;
  res.records = flatten(per_sample);
  if (res.records.empty()) fail(ErrorKind::Sweep, "alpha sweep: no records");
  res.table = aggregate(res.records, suite.bin_labels());

  const AggregateTable all = aggregate_all_bins(res.records);
  json& s = res.summary;
  s["backend"] = to_string(cfg.backend);
  s["samples"] = n;
  s["alpha_units"] = cfg.alpha_units == AlphaUnits::Pixels ? "pixels" : "normalized";
  s["per_alpha"] = json::array();
  std::vector<double> psnr_means, missed, excess;
  for (double a : cfg.alpha_values) {
    const auto* c = all.find(alpha_condition(a), "all");
    psnr_means.push_back(c->psnr_mean);
    missed.push_back(c->missed_mean);
    excess.push_back(c->excess_mean);
    s["per_alpha"].push_back({{"alpha", a},
                              {"psnr", number_or_null(c->psnr_mean)},
                              {"ssim", c->ssim_mean},
                              {"missed", c->missed_mean},
                              {"excess", c->excess_mean},
                              {"iou", c->iou_mean}});
  }
  // Monotonicity is judged in alpha order, whatever order the list came in.
  std::vector<std::size_t> order(cfg.alpha_values.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cfg.alpha_values[a] < cfg.alpha_values[b]; });
  bool missed_ok = true, excess_ok = true;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    missed_ok &= missed[order[k + 1]] <= missed[order[k]];
    excess_ok &= excess[order[k + 1]] >= excess[order[k]];
  }
  std::size_t best = order.front();
  for (std::size_t k : order) {
    if (psnr_means[k] > psnr_means[best]) best = k;
  }
  const double lo_margin = psnr_means[best] - psnr_means[order.front()];
  const double hi_margin = psnr_means[best] - psnr_means[order.back()];
  s["missed_non_increasing"] = missed_ok;
  s["excess_non_decreasing"] = excess_ok;
  s["best_alpha"] = cfg.alpha_values[best];
  s["margin_over_smallest_db"] = number_or_null(lo_margin);
  s["margin_over_largest_db"] = number_or_null(hi_margin);
  s["interior_optimum"] = lo_margin >= 0.1 && hi_margin >= 0.1;
  return res;
}

SweepResult run_mask_family_contrast(const ExperimentConfig& cfg, const Suite& suite) {
  cfg.validate();
  const std::size_t n = suite.samples.size();
  std::vector<std::vector<MetricsRecord>> per_sample(n);
  std::vector<double> ratio_gap(n, 0.0);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    const auto& t = suite.samples[i];
    const std::string bin = bin_of(suite, t.mask_ratio);
    per_sample[i].push_back(evaluate_hole(cfg, t, t.input, t.mask, suite.ids[i], bin, "object"));
    const BinaryMask rnd = random_irregular_mask(t.mask.extents(), t.mask_ratio, mix_seed(t.seed, 2));
    ratio_gap[i] = mask_ratio(rnd) - t.mask_ratio;
    // Random holes are cut from the clean image, the usual random-mask protocol.
    per_sample[i].push_back(evaluate_hole(cfg, t, t.ground_truth, rnd, suite.ids[i], bin, "random"));
  });
  SweepResult res;
  res.records = flatten(per_sample);
  if (res.records.empty()) fail(ErrorKind::Sweep, "contrast: no records");
  res.table = aggregate(res.records, suite.bin_labels());
  json& s = res.summary;
  s["backend"] = to_string(cfg.backend);
  s["samples"] = n;
  double worst_gap = 0.0;
  for (double g : ratio_gap) worst_gap = std::max(worst_gap, std::abs(g));
  s["max_ratio_gap"] = worst_gap;
  s["deltas"] = json::array();
  for (const auto& bin : res.table.bins) {
    const auto* o = res.table.find("object", bin);
    const auto* r = res.table.find("random", bin);
    if (!o || !r) continue;
    s["deltas"].push_back({{"bin", bin},
                           {"psnr_object", number_or_null(o->psnr_mean)},
                           {"psnr_random", number_or_null(r->psnr_mean)},
                           {"psnr_delta", number_or_null(r->psnr_mean - o->psnr_mean)},
                           {"ssim_object", o->ssim_mean},
                           {"ssim_random", r->ssim_mean},
                           {"ssim_delta", r->ssim_mean - o->ssim_mean}});
  }
  return res;
}

void write_sweep(const ExperimentConfig& cfg, const SweepResult& result, const std::string& stem) {
  ensure_dir(cfg.out);
  {
    auto f = open_out(cfg.out / (stem + ".csv"));
    write_records_csv(f, result.records);
  }
  {
    auto f = open_out(cfg.out / (stem + "_cells.csv"));
    write_aggregate_csv(f, result.table);
  }
  {
    auto f = open_out(cfg.out / (stem + "_table.csv"));
    write_wide_table_csv(f, result.table);
  }
  auto f = open_out(cfg.out / (stem + "_summary.json"));
  f << result.summary.dump(2) << "\n";
}

json render_figures(const ExperimentConfig& cfg, const Suite& suite) {
  if (cfg.render_sample >= suite.samples.size()) {
    fail(ErrorKind::Config, "render_sample " + std::to_string(cfg.render_sample) + " out of range");
  }
  const auto& t = suite.samples[cfg.render_sample];
  ensure_dir(cfg.out);
  std::vector<Image> panel{t.input};
  std::vector<std::string> names{"dilation_input.png"};
  for (int d : {-2, 0, 2}) {
    panel.push_back(inpaint_hole(cfg, t.input, rescale_mask(t.mask, d)));
    names.push_back("dilation_" + d_condition(d).erase(1, 1) + ".png");
  }
  panel.push_back(t.ground_truth);
  names.push_back("dilation_gt.png");
  json s;
  s["sample"] = suite.ids[cfg.render_sample];
  s["panel"] = json::array();
  for (std::size_t k = 0; k < panel.size(); ++k) {
    io::save_image(cfg.out / names[k], panel[k]);
    s["panel"].push_back(names[k]);
  }
  io::save_image(cfg.out / "dilation_panel.png", hconcat(panel, 2));

  const SignedDistanceField sdf = normalize_sdf(signed_distance(t.mask));
  s["offset_maps"] = json::array();
  for (double a : cfg.render_alphas) {
    const std::string tag = format_g(a);
    io::save_image(cfg.out / ("offset_alpha_" + tag + ".png"), render_offset_map(sdf, a));
    io::save_image(cfg.out / ("contour_alpha_" + tag + ".png"), render_contour_overlay(sdf, a));
    s["offset_maps"].push_back({{"alpha", a},
                                {"offset", "offset_alpha_" + tag + ".png"},
                                {"contour", "contour_alpha_" + tag + ".png"},
                                {"zero_contour_area", offset_region(sdf, a).count()},
                                {"radius_px", sdf.to_pixels(a)}});
  }
  auto f = open_out(cfg.out / "render.json");
  f << s.dump(2) << "\n";
  return s;
}

LabelMap composite_labels(const LabelMap& background, const BinaryMask& pasted) {
  require_same_extents(background.extents(), pasted.extents(), "composite_labels");
  std::set<std::uint32_t> present;
  for (std::size_t i = 0; i < pasted.size(); ++i) {
    if (!pasted[i]) present.insert(background[i]);
  }
  std::map<std::uint32_t, std::uint32_t> remap;
  std::uint32_t next = 0;
  for (auto id : present) remap[id] = next++;
  LabelMap out(background.height(), background.width());
  for (std::size_t i = 0; i < pasted.size(); ++i) {
    out.ids()[i] = pasted[i] ? next : remap[background[i]];
  }
  for (auto [from, to] : remap) out.class_table()[to] = background.class_of(from);
  out.class_table()[next] = 1;
  return out;
}

EvalOneInput eval_input_from_suite(const Suite& suite, std::size_t index, double alpha) {
  if (index >= suite.samples.size()) {
    fail(ErrorKind::Config, "sample " + std::to_string(index) + " out of range");
  }
  const auto& t = suite.samples[index];
  EvalOneInput in;
  in.input = t.input;
  in.target = t.mask;
  in.ground_truth = t.ground_truth;
  in.alpha = alpha;
  if (!suite.sources.empty()) {
    in.labels = composite_labels(suite.sources[t.background_source].labels, t.mask);
  } else {
    in.labels = LabelMap(t.mask.height(), t.mask.width());
    for (std::size_t p = 0; p < t.mask.size(); ++p) in.labels.ids()[p] = t.mask[p];
    in.labels.class_table() = {{0, 0}, {1, 1}};
  }
  return in;
}

json run_eval_one(const ExperimentConfig& cfg, const EvalOneInput& in) {
  require_same_extents(in.input.extents(), in.target.extents(), "eval-one");
  require_same_extents(in.input.extents(), in.labels.extents(), "eval-one");
  in.labels.validate();
  ensure_dir(cfg.out);

  // Segment preview and legend.
  const std::uint32_t count = in.labels.segment_count();
  std::vector<std::array<float, 3>> palette(count);
  json legend;
  legend["segments"] = json::array();
  for (std::uint32_t id = 0; id < count; ++id) {
    const std::uint64_t h = mix_seed(id, 77);
    for (int k = 0; k < 3; ++k) {
      palette[id][k] = std::nearbyint(255.0 * (0.2 + 0.8 * ((h >> (8 * k)) & 0xFF) / 255.0)) / 255.0f;
    }
    const BinaryMask seg = in.labels.segment_mask(id);
    std::size_t overlap = 0;
    for (std::size_t p = 0; p < seg.size(); ++p) overlap += seg[p] && in.target[p];
    legend["segments"].push_back({{"id", id},
                                  {"class", in.labels.class_of(id)},
                                  {"color", {std::lround(palette[id][0] * 255),
                                             std::lround(palette[id][1] * 255),
                                             std::lround(palette[id][2] * 255)}},
                                  {"pixels", seg.count()},
                                  {"target_overlap", overlap}});
  }

  const Expansion ex =
      expand_for_inpainting(in.labels, in.target, in.alpha, cfg.alpha_units, cfg.segment_id);
  legend["selected"] = ex.segment_id;
  legend["selected_by"] = cfg.segment_id ? "user" : "largest_overlap";

  Image preview(in.input.height(), in.input.width(), 3);
  const BinaryMask outline = inner_contour(ex.segment);
  for (int y = 0; y < preview.height(); ++y) {
    for (int x = 0; x < preview.width(); ++x) {
      const auto& c = palette[in.labels.at(y, x)];
      for (int k = 0; k < 3; ++k) preview.at(y, x, k) = outline.at(y, x) ? 1.0f : c[k];
    }
  }
  io::save_image(cfg.out / "eval_segments.png", preview);
  {
    auto f = open_out(cfg.out / "eval_segments.json");
    f << legend.dump(2) << "\n";
  }

  const Image result = inpaint_hole(cfg, in.input, ex.mask);
  io::save_image(cfg.out / "eval_inpainted.png", result);
  io::save_mask(cfg.out / "eval_mask.png", ex.mask);

  json r;
  r["segment_id"] = ex.segment_id;
  r["alpha"] = in.alpha;
  r["alpha_units"] = cfg.alpha_units == AlphaUnits::Pixels ? "pixels" : "normalized";
  r["radius_px"] = ex.radius_px;
  r["backend"] = to_string(cfg.backend);
  r["mask_ratio"] = mask_ratio(ex.mask);
  const CoverageStats cov = coverage_stats(ex.mask, in.target);
  r["coverage"] = {{"missed", cov.missed}, {"excess", cov.excess}, {"iou", cov.iou}, {"covered", cov.covered}};
  if (in.ground_truth) {
    require_same_extents(in.input.extents(), in.ground_truth->extents(), "eval-one");
    if (cfg.masked_only) {
      const BinaryMask region = mask_union(ex.mask, in.target);
      r["psnr"] = number_or_null(psnr_masked(*in.ground_truth, result, region));
      r["ssim"] = ssim_masked(*in.ground_truth, result, region);
    } else {
      r["psnr"] = number_or_null(psnr(*in.ground_truth, result));
      r["ssim"] = ssim(*in.ground_truth, result);
    }
  }
  auto f = open_out(cfg.out / "eval_result.json");
  f << r.dump(2) << "\n";
  return r;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Parameter:
      return 2;
    case ErrorKind::Sweep:
    case ErrorKind::DegenerateMask:
      return 4;
    default:
      return 3;
  }
}

}  // namespace maskopt
