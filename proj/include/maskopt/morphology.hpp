#pragma once

#include "maskopt/image.hpp"

namespace maskopt {

// Euclidean-disk dilation: out(p) = 1 iff some set pixel q has |p - q| <= radius.
BinaryMask dilate(const BinaryMask& mask, double radius);

// Dual of dilate: complement(dilate(complement(mask), radius)).
BinaryMask erode(const BinaryMask& mask, double radius);

// d >= 0 dilates by d pixels, d < 0 erodes by |d|. An erosion that empties
// the mask throws DegenerateMask.
BinaryMask rescale_mask(const BinaryMask& mask, int d);

}  // namespace maskopt
