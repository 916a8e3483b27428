#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "maskopt/image.hpp"
#include "maskopt/metrics.hpp"

namespace maskopt {

struct ObjectCutout {
  Image patch;
  BinaryMask mask;  // tight: cropped to the segment's bounding box
  int class_id = 0;
  std::uint32_t source_segment = 0;
};

struct SampleTriplet {
  Image input;         // background with the object pasted
  Image ground_truth;  // background
  BinaryMask mask;
  double mask_ratio = 0.0;
  std::uint64_t seed = 0;
  // Provenance of the composite.
  std::size_t background_source = 0;
  std::size_t object_source = 0;
  std::uint32_t object_segment = 0;
  int row = 0;  // top-left of the placed cutout, may be negative
  int col = 0;
  bool clipped = false;
};

// One cutout per segment of class `class_filter`.
std::vector<ObjectCutout> extract_objects(const Image& img, const LabelMap& labels,
                                          int class_filter);

// Hard composite of `obj` with its top-left at (row, col). Throws Placement
// when nothing of the mask survives clipping.
SampleTriplet superimpose(const Image& bg, const ObjectCutout& obj, int row, int col,
                          std::uint64_t seed);

struct SceneSource {
  Image image;
  LabelMap labels;
};

// Textured background, one class-1 "hero" blob and a few class-2 clutter
// shapes. Pixel values sit on the 8-bit grid so PNG round trips are exact.
SceneSource procedural_scene(int height, int width, std::uint64_t seed);
std::vector<SceneSource> procedural_corpus(int height, int width, std::size_t count,
                                           std::uint64_t seed);

struct GenerationOptions {
  int class_filter = 1;
  int max_attempts = 100;
  double min_ratio = 2.0;  // percent; keeps tiny slivers out of the lowest bin
  int jobs = 1;
};

// n samples; sample i targets bins[i % bins.size()] and uses seed + i.
// Throws Generation naming the bin when a quota cannot be met.
std::vector<SampleTriplet> generate_samples(const std::vector<SceneSource>& sources,
                                            std::size_t n, const std::vector<MaskBin>& bins,
                                            std::uint64_t seed,
                                            const GenerationOptions& options = {});

std::string sample_id(std::size_t index);

// NNNNNN_input.png, NNNNNN_gt.png, NNNNNN_mask.png and manifest.json.
void write_dataset(const std::filesystem::path& dir, const std::vector<SampleTriplet>& samples,
                   const std::vector<MaskBin>& bins, std::uint64_t seed);

struct LoadedSample {
  std::string id;
  std::string bin;
  SampleTriplet triplet;
};
std::vector<LoadedSample> load_dataset(const std::filesystem::path& dir);

// generate_samples followed by write_dataset.
void generate_dataset(const std::vector<SceneSource>& sources, std::size_t n,
                      const std::vector<MaskBin>& bins, std::uint64_t seed,
                      const std::filesystem::path& dir, const GenerationOptions& options = {});

// Union of random-walk brush strokes with |ratio - target_ratio| <= 2 points.
BinaryMask random_irregular_mask(Extents extents, double target_ratio, std::uint64_t seed);

}  // namespace maskopt
