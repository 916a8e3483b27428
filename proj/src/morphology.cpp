#include "maskopt/morphology.hpp"

#include <string>

#include "maskopt/distfield.hpp"

namespace maskopt {

BinaryMask dilate(const BinaryMask& mask, double radius) {
  if (!(radius >= 0.0)) fail(ErrorKind::Parameter, "dilate: radius must be >= 0");
  if (!mask.any()) return mask;
  const RealGrid sq = squared_distance_to(mask);
  const double r2 = radius * radius;
  BinaryMask out(mask.height(), mask.width());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sq.data[i] <= r2 ? 1 : 0;
  return out;
}

BinaryMask erode(const BinaryMask& mask, double radius) {
  if (!(radius >= 0.0)) fail(ErrorKind::Parameter, "erode: radius must be >= 0");
  return dilate(mask.complement(), radius).complement();
}

BinaryMask rescale_mask(const BinaryMask& mask, int d) {
  if (d >= 0) return dilate(mask, d);
  BinaryMask out = erode(mask, -d);
  if (!out.any()) {
    fail(ErrorKind::DegenerateMask,
         "rescale_mask: erosion by " + std::to_string(-d) + " px empties the mask");
  }
  return out;
}

}  // namespace maskopt
