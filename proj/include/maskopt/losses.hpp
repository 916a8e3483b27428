#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "maskopt/distfield.hpp"
#include "maskopt/image.hpp"

namespace maskopt {

// Per-pixel mask probabilities in [0,1].
class SoftMask {
 public:
  SoftMask() = default;
  SoftMask(int height, int width, double value = 0.0);
  // Throws InputShape if any value is outside [0,1] or non-finite.
  explicit SoftMask(RealGrid grid);

  static SoftMask from_mask(const BinaryMask& mask);

  int height() const { return grid_.height; }
  int width() const { return grid_.width; }
  Extents extents() const { return grid_.extents(); }
  std::size_t size() const { return grid_.data.size(); }
  const RealGrid& grid() const { return grid_; }
  double operator[](std::size_t i) const { return grid_.data[i]; }
  // Clamps into [0,1].
  void set(std::size_t i, double v);

 private:
  RealGrid grid_;
};

struct FeatureLevel {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;  // channel-major: data[(c*height + y)*width + x]

  std::size_t element_count() const {
    return static_cast<std::size_t>(channels) * height * width;
  }
};

struct FeaturePyramid {
  std::vector<FeatureLevel> levels;
};

struct CriticScores {
  std::vector<double> scores;
};

// Pixel-major class probabilities: data[pixel * classes + k].
struct ClassProbabilities {
  int height = 0;
  int width = 0;
  int classes = 0;
  std::vector<double> data;
};

struct LossWeights {
  double lambda_EG = 1.0;
  double lambda_EF = 10.0;
  double lambda_SG = 0.1;
  double lambda_SC = 1.0;
  double lambda_IG = 0.1;
  double lambda_IF = 0.1;
  double lambda_IS = 250.0;
  double lambda_IR = 1.0;
  double lambda_X = 1000.0;
  double alpha = 0.03;

  bool operator==(const LossWeights&) const = default;
};

void to_json(nlohmann::json& j, const LossWeights& w);
void from_json(const nlohmann::json& j, LossWeights& w);

// sum_p phi(p) * m(p)
double boundary_loss(const SignedDistanceField& sdf, const SoftMask& m);

struct MaskExpansionResult {
  double value = 0.0;
  RealGrid gradient;  // d value / d m(p) = phi(p) - alpha
};

// sum_p (phi(p) - alpha) * m(p), with its gradient in m.
MaskExpansionResult mask_expansion_loss(const SignedDistanceField& sdf, const SoftMask& m,
                                        double alpha);

// (1 / n_masked) * sum |ref - test| over every pixel and channel.
double reconstruction_loss(const Image& ref, const Image& test, std::size_t n_masked);
// Same normalization, but the L1 sum only runs over pixels inside `mask`.
double reconstruction_loss_masked(const Image& ref, const Image& test, const BinaryMask& mask);

// Row-major channels x channels matrix F F^T / (channels * H * W).
std::vector<double> gram(const FeatureLevel& level);

// sum over levels of the elementwise L1 distance between Gram matrices.
double style_loss(const FeaturePyramid& a, const FeaturePyramid& b);

// sum over levels of |a_i - b_i|_1 / N_i.
double feature_matching_loss(const FeaturePyramid& a, const FeaturePyramid& b);

struct HingeLosses {
  double generator = 0.0;
  double discriminator = 0.0;
};
HingeLosses hinge_gan_losses(const CriticScores& real, const CriticScores& fake);

// Mean over pixels of -log p(class of the pixel's segment), p clamped at 1e-12.
double pixelwise_cross_entropy(const ClassProbabilities& pred, const LabelMap& gt);

// Intensity plus horizontal and vertical central differences at three dyadic
// scales (2x2 average pooling between scales). 3-channel inputs are converted
// to grayscale first.
FeaturePyramid handcrafted_pyramid(const Image& img, int levels = 3);

// Named loss components. A term that is neither given a value nor marked
// absent may only be omitted when its weight is zero.
class LossTerms {
 public:
  LossTerms& set(const std::string& name, double value);
  LossTerms& mark_absent(const std::string& name);

  bool has(const std::string& name) const { return values_.contains(name); }
  bool is_absent(const std::string& name) const { return absent_.contains(name); }
  // Value, 0 if absent or unweighted; throws Config otherwise.
  double get(const std::string& name, double weight) const;

 private:
  std::map<std::string, double> values_;
  std::set<std::string> absent_;
};

// L_E = lambda_EG L_EG + lambda_EF L_EF
double edge_inpainter_loss(const LossTerms& t, const LossWeights& w);
// L_S = lambda_SG L_SG + lambda_SC L_SC
double segmentation_inpainter_loss(const LossTerms& t, const LossWeights& w);
// L_I = lambda_IG L_IG + lambda_IF L_IF + lambda_IS L_IS + lambda_IR L_IR
double image_inpainter_loss(const LossTerms& t, const LossWeights& w);
// L_SN = L_PS + L_E + L_S + L_I + lambda_X L_X. L_E, L_S and L_I are taken
// as given when set, otherwise assembled from their parts.
double total_loss(const LossTerms& t, const LossWeights& w);

}  // namespace maskopt
