#include "maskopt/losses.hpp"

#include <algorithm>
#include <cmath>

#include "maskopt/numeric.hpp"

namespace maskopt {
namespace {

void check_sdf_mask(const SignedDistanceField& sdf, const SoftMask& m, const char* what) {
  require_same_extents(sdf.extents(), m.extents(), what);
}

void check_pyramids(const FeaturePyramid& a, const FeaturePyramid& b, const char* what) {
  if (a.levels.empty() || a.levels.size() != b.levels.size()) {
    fail(ErrorKind::InputShape, std::string(what) + ": pyramids have different level counts");
  }
  for (std::size_t i = 0; i < a.levels.size(); ++i) {
    const auto& la = a.levels[i];
    const auto& lb = b.levels[i];
    if (la.channels != lb.channels || la.height != lb.height || la.width != lb.width ||
        la.data.size() != la.element_count() || lb.data.size() != lb.element_count()) {
      fail(ErrorKind::InputShape,
           std::string(what) + ": level " + std::to_string(i) + " shapes differ");
    }
    if (la.element_count() == 0) {
      fail(ErrorKind::InputShape, std::string(what) + ": empty level");
    }
  }
}

double mean_of(std::span<const double> v) {
  return pairwise_sum(v) / static_cast<double>(v.size());
}

}  // namespace

SoftMask::SoftMask(int height, int width, double value)
    : SoftMask(RealGrid(height, width, value)) {}

SoftMask::SoftMask(RealGrid grid) : grid_(std::move(grid)) {
  for (double v : grid_.data) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      fail(ErrorKind::InputShape, "SoftMask: values must lie in [0,1]");
    }
  }
}

SoftMask SoftMask::from_mask(const BinaryMask& mask) {
  RealGrid g(mask.height(), mask.width());
  for (std::size_t i = 0; i < mask.size(); ++i) g.data[i] = mask[i] ? 1.0 : 0.0;
  return SoftMask(std::move(g));
}

void SoftMask::set(std::size_t i, double v) { grid_.data[i] = std::clamp(v, 0.0, 1.0); }

void to_json(nlohmann::json& j, const LossWeights& w) {
  j = nlohmann::json{{"lambda_EG", w.lambda_EG}, {"lambda_EF", w.lambda_EF},
                     {"lambda_SG", w.lambda_SG}, {"lambda_SC", w.lambda_SC},
                     {"lambda_IG", w.lambda_IG}, {"lambda_IF", w.lambda_IF},
                     {"lambda_IS", w.lambda_IS}, {"lambda_IR", w.lambda_IR},
                     {"lambda_X", w.lambda_X},   {"alpha", w.alpha}};
}

void from_json(const nlohmann::json& j, LossWeights& w) {
  // Missing keys keep their defaults.
  auto read = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number()) fail(ErrorKind::Config, std::string("loss weight ") + key + " is not a number");
    dst = v.get<double>();
    if (!std::isfinite(dst)) fail(ErrorKind::Config, std::string("loss weight ") + key + " is not finite");
  };
  read("lambda_EG", w.lambda_EG);
  read("lambda_EF", w.lambda_EF);
  read("lambda_SG", w.lambda_SG);
  read("lambda_SC", w.lambda_SC);
  read("lambda_IG", w.lambda_IG);
  read("lambda_IF", w.lambda_IF);
  read("lambda_IS", w.lambda_IS);
  read("lambda_IR", w.lambda_IR);
  read("lambda_X", w.lambda_X);
  read("alpha", w.alpha);
}

double boundary_loss(const SignedDistanceField& sdf, const SoftMask& m) {
  return mask_expansion_loss(sdf, m, 0.0).value;
}

MaskExpansionResult mask_expansion_loss(const SignedDistanceField& sdf, const SoftMask& m,
                                        double alpha) {
  check_sdf_mask(sdf, m, "mask_expansion_loss");
  if (!(alpha >= 0.0)) fail(ErrorKind::Parameter, "mask_expansion_loss: alpha must be >= 0");
  MaskExpansionResult out;
  out.gradient = RealGrid(sdf.field.height, sdf.field.width);
  std::vector<double> terms(m.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double g = sdf.field.data[i] - alpha;
    out.gradient.data[i] = g;
    terms[i] = g * m[i];
  }
  out.value = pairwise_sum(terms);
  return out;
}

double reconstruction_loss(const Image& ref, const Image& test, std::size_t n_masked) {
  require_same_extents(ref.extents(), test.extents(), "reconstruction_loss");
  if (ref.channels() != test.channels()) {
    fail(ErrorKind::InputShape, "reconstruction_loss: channel mismatch");
  }
  if (n_masked == 0) fail(ErrorKind::Domain, "reconstruction_loss: no masked pixels");
  std::vector<double> terms(ref.size());
  auto a = ref.data();
  auto b = test.data();
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::abs(double(a[i]) - double(b[i]));
  return pairwise_sum(terms) / static_cast<double>(n_masked);
}

double reconstruction_loss_masked(const Image& ref, const Image& test, const BinaryMask& mask) {
  require_same_extents(ref.extents(), test.extents(), "reconstruction_loss_masked");
  require_same_extents(ref.extents(), mask.extents(), "reconstruction_loss_masked");
  if (ref.channels() != test.channels()) {
    fail(ErrorKind::InputShape, "reconstruction_loss_masked: channel mismatch");
  }
  const std::size_t n = mask.count();
  if (n == 0) fail(ErrorKind::Domain, "reconstruction_loss_masked: no masked pixels");
  const int c = ref.channels();
  std::vector<double> terms;
  terms.reserve(n * c);
  auto a = ref.data();
  auto b = test.data();
  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (!mask[p]) continue;
    for (int k = 0; k < c; ++k) {
      terms.push_back(std::abs(double(a[p * c + k]) - double(b[p * c + k])));
    }
  }
  return pairwise_sum(terms) / static_cast<double>(n);
}

std::vector<double> gram(const FeatureLevel& level) {
  const std::size_t n = static_cast<std::size_t>(level.height) * level.width;
  if (level.channels <= 0 || n == 0) fail(ErrorKind::InputShape, "gram: empty level");
  if (level.data.size() != level.element_count()) {
    fail(ErrorKind::InputShape, "gram: data length does not match shape");
  }
  const int c = level.channels;
  const double norm = static_cast<double>(level.element_count());
  std::vector<double> g(static_cast<std::size_t>(c) * c);
  std::vector<double> prod(n);
  for (int i = 0; i < c; ++i) {
    for (int j = i; j < c; ++j) {
      const double* fi = level.data.data() + i * n;
      const double* fj = level.data.data() + j * n;
      for (std::size_t p = 0; p < n; ++p) prod[p] = fi[p] * fj[p];
      const double v = pairwise_sum(prod) / norm;
      g[static_cast<std::size_t>(i) * c + j] = v;
      g[static_cast<std::size_t>(j) * c + i] = v;
    }
  }
  return g;
}

double style_loss(const FeaturePyramid& a, const FeaturePyramid& b) {
  check_pyramids(a, b, "style_loss");
  std::vector<double> per_level;
  for (std::size_t i = 0; i < a.levels.size(); ++i) {
    const auto ga = gram(a.levels[i]);
    const auto gb = gram(b.levels[i]);
    std::vector<double> diff(ga.size());
    for (std::size_t k = 0; k < ga.size(); ++k) diff[k] = std::abs(ga[k] - gb[k]);
    per_level.push_back(pairwise_sum(diff));
  }
  return pairwise_sum(per_level);
}

double feature_matching_loss(const FeaturePyramid& a, const FeaturePyramid& b) {
  check_pyramids(a, b, "feature_matching_loss");
  std::vector<double> per_level;
  for (std::size_t i = 0; i < a.levels.size(); ++i) {
    const auto& da = a.levels[i].data;
    const auto& db = b.levels[i].data;
    std::vector<double> diff(da.size());
    for (std::size_t k = 0; k < da.size(); ++k) diff[k] = std::abs(da[k] - db[k]);
    per_level.push_back(pairwise_sum(diff) / static_cast<double>(a.levels[i].element_count()));
  }
  return pairwise_sum(per_level);
}

HingeLosses hinge_gan_losses(const CriticScores& real, const CriticScores& fake) {
  if (real.scores.empty() || fake.scores.empty()) {
    fail(ErrorKind::InputShape, "hinge_gan_losses: empty score set");
  }
  for (const auto* s : {&real.scores, &fake.scores}) {
    for (double v : *s) {
      if (!std::isfinite(v)) fail(ErrorKind::InputShape, "hinge_gan_losses: non-finite score");
    }
  }
  std::vector<double> real_hinge(real.scores.size());
  std::vector<double> fake_hinge(fake.scores.size());
  for (std::size_t i = 0; i < real.scores.size(); ++i) {
    real_hinge[i] = std::max(0.0, 1.0 - real.scores[i]);
  }
  for (std::size_t i = 0; i < fake.scores.size(); ++i) {
    fake_hinge[i] = std::max(0.0, 1.0 + fake.scores[i]);
  }
  HingeLosses out;
  out.generator = -mean_of(fake.scores);
  out.discriminator = mean_of(real_hinge) + mean_of(fake_hinge);
  return out;
}

double pixelwise_cross_entropy(const ClassProbabilities& pred, const LabelMap& gt) {
  require_same_extents({pred.height, pred.width}, gt.extents(), "pixelwise_cross_entropy");
  const std::size_t pixels = static_cast<std::size_t>(pred.height) * pred.width;
  if (pred.classes <= 0 || pred.data.size() != pixels * pred.classes) {
    fail(ErrorKind::InputShape, "pixelwise_cross_entropy: inconsistent class count");
  }
  if (pixels == 0) fail(ErrorKind::InputShape, "pixelwise_cross_entropy: empty image");
  std::vector<double> terms(pixels);
  for (std::size_t p = 0; p < pixels; ++p) {
    const double* probs = pred.data.data() + p * pred.classes;
    double total = 0.0;
    for (int k = 0; k < pred.classes; ++k) total += probs[k];
    if (std::abs(total - 1.0) > 1e-5) {
      fail(ErrorKind::InputShape, "pixelwise_cross_entropy: probabilities do not sum to 1");
    }
    const int cls = gt.class_of(gt[p]);
    if (cls < 0 || cls >= pred.classes) {
      fail(ErrorKind::InputShape, "pixelwise_cross_entropy: class id out of range");
    }
    terms[p] = -std::log(std::max(probs[cls], 1e-12));
  }
  return mean_of(terms);
}

FeaturePyramid handcrafted_pyramid(const Image& img, int levels) {
  if (levels < 1) fail(ErrorKind::Parameter, "handcrafted_pyramid: levels must be >= 1");
  const Image gray = img.channels() == 3 ? to_grayscale(img) : img;
  int h = gray.height();
  int w = gray.width();
  if (h == 0 || w == 0) fail(ErrorKind::InputShape, "handcrafted_pyramid: empty image");
  std::vector<double> intensity(gray.data().begin(), gray.data().end());

  FeaturePyramid out;
  for (int l = 0; l < levels && h > 0 && w > 0; ++l) {
    FeatureLevel level{3, h, w, std::vector<double>(3 * static_cast<std::size_t>(h) * w)};
    const std::size_t n = static_cast<std::size_t>(h) * w;
    auto at = [&](int y, int x) {
      return intensity[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
    };
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        level.data[i] = at(y, x);
        level.data[n + i] = 0.5 * (at(y, x + 1) - at(y, x - 1));
        level.data[2 * n + i] = 0.5 * (at(y + 1, x) - at(y - 1, x));
      }
    }
    out.levels.push_back(std::move(level));

    const int nh = h / 2;
    const int nw = w / 2;
    std::vector<double> pooled(static_cast<std::size_t>(nh) * nw);
    for (int y = 0; y < nh; ++y) {
      for (int x = 0; x < nw; ++x) {
        pooled[static_cast<std::size_t>(y) * nw + x] =
            0.25 * (at(2 * y, 2 * x) + at(2 * y, 2 * x + 1) + at(2 * y + 1, 2 * x) +
                    at(2 * y + 1, 2 * x + 1));
      }
    }
    intensity = std::move(pooled);
    h = nh;
    w = nw;
  }
  return out;
}

LossTerms& LossTerms::set(const std::string& name, double value) {
  if (!std::isfinite(value)) fail(ErrorKind::Config, "loss term " + name + " is not finite");
  values_[name] = value;
  absent_.erase(name);
  return *this;
}

LossTerms& LossTerms::mark_absent(const std::string& name) {
  values_.erase(name);
  absent_.insert(name);
  return *this;
}

double LossTerms::get(const std::string& name, double weight) const {
  if (auto it = values_.find(name); it != values_.end()) return it->second;
  if (absent_.contains(name) || weight == 0.0) return 0.0;
  fail(ErrorKind::Config, "loss term " + name + " has nonzero weight but is neither set nor marked absent");
}

double edge_inpainter_loss(const LossTerms& t, const LossWeights& w) {
  return w.lambda_EG * t.get("L_EG", w.lambda_EG) + w.lambda_EF * t.get("L_EF", w.lambda_EF);
}

double segmentation_inpainter_loss(const LossTerms& t, const LossWeights& w) {
  return w.lambda_SG * t.get("L_SG", w.lambda_SG) + w.lambda_SC * t.get("L_SC", w.lambda_SC);
}

double image_inpainter_loss(const LossTerms& t, const LossWeights& w) {
  return w.lambda_IG * t.get("L_IG", w.lambda_IG) + w.lambda_IF * t.get("L_IF", w.lambda_IF) +
         w.lambda_IS * t.get("L_IS", w.lambda_IS) + w.lambda_IR * t.get("L_IR", w.lambda_IR);
}

double total_loss(const LossTerms& t, const LossWeights& w) {
  auto composite = [&](const std::string& name, auto assemble) {
    if (t.has(name) || t.is_absent(name)) return t.get(name, 1.0);
    return assemble(t, w);
  };
  const double le = composite("L_E", edge_inpainter_loss);
  const double ls = composite("L_S", segmentation_inpainter_loss);
  const double li = composite("L_I", image_inpainter_loss);
  return t.get("L_PS", 1.0) + le + ls + li + w.lambda_X * t.get("L_X", w.lambda_X);
}

}  // namespace maskopt
