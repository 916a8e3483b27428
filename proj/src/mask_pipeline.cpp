#include "maskopt/mask_pipeline.hpp"

#include <cmath>
#include <map>

namespace maskopt {

std::uint32_t select_segment_id(const LabelMap& labels, const BinaryMask& target) {
  require_same_extents(labels.extents(), target.extents(), "select_segment");
  if (!target.any()) fail(ErrorKind::Domain, "select_segment: empty target");
  std::map<std::uint32_t, std::size_t> overlap;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i]) ++overlap[labels[i]];
  }
  // std::map iterates ids in increasing order, so strict '>' keeps the lowest id on ties.
  std::uint32_t best = 0;
  std::size_t best_overlap = 0;
  for (const auto& [id, n] : overlap) {
    if (n > best_overlap) {
      best = id;
      best_overlap = n;
    }
  }
  if (best_overlap == 0) fail(ErrorKind::NoOverlap, "select_segment: no segment overlaps the target");
  return best;
}

BinaryMask select_segment(const LabelMap& labels, const BinaryMask& target) {
  return labels.segment_mask(select_segment_id(labels, target));
}

SoftMaskTrace optimize_soft_mask_traced(const SignedDistanceField& sdf, const SoftMask& init,
                                        double alpha, int steps, double step_size) {
  require_same_extents(sdf.extents(), init.extents(), "optimize_soft_mask");
  if (steps < 1) fail(ErrorKind::Parameter, "optimize_soft_mask: steps must be >= 1");
  if (!(step_size > 0.0)) fail(ErrorKind::Parameter, "optimize_soft_mask: step_size must be > 0");
  for (double v : sdf.field.data) {
    if (!std::isfinite(v)) fail(ErrorKind::InputShape, "optimize_soft_mask: non-finite distance");
  }
  SoftMaskTrace trace{init, {}};
  trace.loss.reserve(steps + 1);
  for (int s = 0; s < steps; ++s) {
    const auto eval = mask_expansion_loss(sdf, trace.mask, alpha);
    trace.loss.push_back(eval.value);
    for (std::size_t i = 0; i < trace.mask.size(); ++i) {
      trace.mask.set(i, trace.mask[i] - step_size * eval.gradient.data[i]);
    }
  }
  trace.loss.push_back(mask_expansion_loss(sdf, trace.mask, alpha).value);
  return trace;
}

SoftMask optimize_soft_mask(const SignedDistanceField& sdf, const SoftMask& init, double alpha,
                            int steps, double step_size) {
  return optimize_soft_mask_traced(sdf, init, alpha, steps, step_size).mask;
}

BinaryMask expansion_minimizer(const SignedDistanceField& sdf, double alpha) {
  BinaryMask out(sdf.field.height, sdf.field.width);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sdf.field.data[i] <= alpha ? 1 : 0;
  return out;
}

BinaryMask binarize(const SoftMask& m, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    fail(ErrorKind::Parameter, "binarize: threshold must lie in (0,1)");
  }
  BinaryMask out(m.height(), m.width());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = m[i] >= threshold ? 1 : 0;
  return out;
}

AlphaUnits parse_alpha_units(const std::string& name) {
  if (name == "normalized") return AlphaUnits::Normalized;
  if (name == "pixels") return AlphaUnits::Pixels;
  fail(ErrorKind::Config, "unknown alpha units '" + name + "' (expected normalized or pixels)");
}

double alpha_to_pixels(const BinaryMask& segment, double alpha, AlphaUnits units) {
  if (!(alpha >= 0.0)) fail(ErrorKind::Parameter, "alpha must be >= 0");
  if (units == AlphaUnits::Pixels) return alpha;
  return normalize_sdf(signed_distance(segment)).to_pixels(alpha);
}

Expansion expand_segment(const BinaryMask& segment, double alpha, AlphaUnits units) {
  if (!(alpha >= 0.0)) fail(ErrorKind::Parameter, "alpha must be >= 0");
  const SignedDistanceField raw = signed_distance(segment);
  Expansion out;
  out.segment = segment;
  out.radius_px = units == AlphaUnits::Pixels ? alpha : normalize_sdf(raw).to_pixels(alpha);
  out.mask = expansion_minimizer(raw, out.radius_px);
  return out;
}

Expansion expand_for_inpainting(const LabelMap& labels, const BinaryMask& target, double alpha,
                                AlphaUnits units, std::optional<std::uint32_t> segment_override) {
  std::uint32_t id;
  if (segment_override) {
    id = *segment_override;
    if (id >= labels.segment_count()) {
      fail(ErrorKind::Config, "segment id " + std::to_string(id) + " does not exist");
    }
  } else {
    id = select_segment_id(labels, target);
  }
  Expansion out = expand_segment(labels.segment_mask(id), alpha, units);
  out.segment_id = id;
  return out;
}

CoverageStats coverage_stats(const BinaryMask& m, const BinaryMask& target) {
  require_same_extents(m.extents(), target.extents(), "coverage_stats");
  CoverageStats s;
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const bool a = m[i] != 0;
    const bool b = target[i] != 0;
    if (b && !a) ++s.missed;
    if (a && !b) ++s.excess;
    if (a && b) ++inter;
    if (a || b) ++uni;
  }
  if (uni == 0) fail(ErrorKind::Domain, "coverage_stats: both masks are empty");
  s.iou = static_cast<double>(inter) / static_cast<double>(uni);
  s.covered = s.missed == 0;
  return s;
}

}  // namespace maskopt
