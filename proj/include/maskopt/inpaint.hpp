#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "maskopt/image.hpp"

namespace maskopt {

enum class Backend { Diffusion, FastMarch };

Backend parse_backend(const std::string& name);
std::string to_string(Backend backend);

struct DiffusionParams {
  int iterations = 2000;
  double dt = 0.2;
  // Stop once the largest per-step change falls below this.
  double tolerance = 1e-6;
};

struct FastMarchParams {
  int window_radius = 5;
};

struct InpaintRequest {
  Image masked_input;
  BinaryMask mask;
  Backend backend = Backend::Diffusion;
  DiffusionParams diffusion;
  FastMarchParams fast_march;
};

// Explicit heat-equation steps on the masked pixels with the unmasked pixels
// held fixed. Masked pixels start from the mean of the known pixels bordering
// the hole, so every step is a convex combination.
Image inpaint_diffusion(const InpaintRequest& req);

// Telea-style fast marching: masked pixels are filled in increasing distance
// from the known region, each as a weighted average of known pixels within a
// square window.
Image inpaint_fast_march(const InpaintRequest& req);

// Order in which inpaint_fast_march visits masked pixels (flat indices).
std::vector<std::size_t> fast_march_order(const BinaryMask& mask);

// Dispatches on req.backend.
Image inpaint(const InpaintRequest& req);

}  // namespace maskopt
