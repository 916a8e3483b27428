#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maskopt/distfield.hpp"
#include "maskopt/image.hpp"
#include "maskopt/losses.hpp"
#include "maskopt/metrics.hpp"

namespace maskopt {

// Id of the segment with the largest overlap with `target`; ties go to the
// lowest id. Throws NoOverlap when every overlap is zero.
std::uint32_t select_segment_id(const LabelMap& labels, const BinaryMask& target);
BinaryMask select_segment(const LabelMap& labels, const BinaryMask& target);

struct SoftMaskTrace {
  SoftMask mask;
  std::vector<double> loss;  // mask-expansion loss before each step and after the last
};

// Projected gradient descent on the mask-expansion loss:
// m <- clamp(m - step_size * (phi - alpha), 0, 1).
SoftMask optimize_soft_mask(const SignedDistanceField& sdf, const SoftMask& init, double alpha,
                            int steps, double step_size);
SoftMaskTrace optimize_soft_mask_traced(const SignedDistanceField& sdf, const SoftMask& init,
                                        double alpha, int steps, double step_size);

// Minimizer of the mask-expansion loss over [0,1]^pixels, binarized. The loss
// is separable and linear in m, so m(p) = 1 where phi(p) < alpha and 0 where
// phi(p) > alpha. Pixels with phi(p) == alpha do not change the loss; they are
// included so the result is exactly the disk dilation.
BinaryMask expansion_minimizer(const SignedDistanceField& sdf, double alpha);

// out(p) = 1 iff m(p) >= threshold.
BinaryMask binarize(const SoftMask& m, double threshold = 0.5);

enum class AlphaUnits { Normalized, Pixels };
AlphaUnits parse_alpha_units(const std::string& name);

// Pixel radius equivalent to alpha for the field of `segment`: normalized
// alphas are multiplied by the largest absolute distance in that field.
double alpha_to_pixels(const BinaryMask& segment, double alpha, AlphaUnits units);

struct Expansion {
  std::uint32_t segment_id = 0;
  BinaryMask segment;   // selected segment before expansion
  BinaryMask mask;      // mask handed to the inpainter
  double radius_px = 0.0;
};

// select_segment (or the forced segment id) -> signed_distance ->
// mask-expansion minimizer -> binary mask.
Expansion expand_for_inpainting(const LabelMap& labels, const BinaryMask& target, double alpha,
                                AlphaUnits units = AlphaUnits::Normalized,
                                std::optional<std::uint32_t> segment_override = std::nullopt);

// Expands a given segment directly (no selection step).
Expansion expand_segment(const BinaryMask& segment, double alpha,
                         AlphaUnits units = AlphaUnits::Normalized);

CoverageStats coverage_stats(const BinaryMask& m, const BinaryMask& target);

}  // namespace maskopt
