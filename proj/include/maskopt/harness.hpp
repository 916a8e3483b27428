#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "maskopt/inpaint.hpp"
#include "maskopt/losses.hpp"
#include "maskopt/mask_pipeline.hpp"
#include "maskopt/metrics.hpp"
#include "maskopt/synthgen.hpp"

namespace maskopt {

struct GenerationSpec {
  int height = 128;
  int width = 128;
  std::size_t n = 200;
  std::size_t sources = 24;  // procedural scenes in the corpus
  std::vector<MaskBin> bins = default_bins();
  GenerationOptions options;
};

// Simulated imperfect segmentation for the alpha sweep.
struct PerturbationSpec {
  int max_erosion = 2;     // erosion radius drawn uniformly from {0..max_erosion}
  double flip_prob = 0.05; // per-pixel flip probability near the boundary
  double band = 1.0;       // pixels within this distance of the boundary may flip
};

struct ExperimentConfig {
  std::filesystem::path dataset;  // empty: generate the suite in memory
  GenerationSpec generation;
  Backend backend = Backend::Diffusion;
  DiffusionParams diffusion;
  FastMarchParams fast_march;
  std::vector<int> d_values{-2, 0, 2, 4, 6, 8};
  std::vector<double> alpha_values{0.0, 0.01, 0.03, 0.05, 0.07};
  std::vector<double> render_alphas{0.01, 0.03, 0.05, 0.07};
  std::size_t render_sample = 0;
  std::uint64_t seed = 1234;
  std::filesystem::path out = "out";
  LossWeights loss_weights;
  bool masked_only = false;
  std::optional<std::uint32_t> segment_id;
  AlphaUnits alpha_units = AlphaUnits::Normalized;
  PerturbationSpec perturbation;
  int jobs = 1;

  void validate() const;
};

// Missing keys keep their defaults; unknown keys and bad values throw Config.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Suite {
  std::vector<std::string> ids;
  std::vector<SampleTriplet> samples;
  std::vector<SceneSource> sources;  // empty when loaded from disk
  std::vector<MaskBin> bins;

  std::vector<std::string> bin_labels() const;
};

Suite generate_suite(const ExperimentConfig& cfg);
// Loads cfg.dataset when set, otherwise generates.
Suite prepare_suite(const ExperimentConfig& cfg);

struct SweepResult {
  std::vector<MetricsRecord> records;  // sample order, then condition order
  AggregateTable table;
  nlohmann::json summary;
};

std::string d_condition(int d);
std::string alpha_condition(double alpha);

// Inpaints `hole` in `input` and scores the result against the ground truth.
MetricsRecord evaluate_hole(const ExperimentConfig& cfg, const SampleTriplet& t,
                            const Image& input, const BinaryMask& hole, const std::string& id,
                            const std::string& bin, const std::string& condition);

SweepResult run_dilation_sweep(const ExperimentConfig& cfg, const Suite& suite);
SweepResult run_alpha_sweep(const ExperimentConfig& cfg, const Suite& suite);
SweepResult run_mask_family_contrast(const ExperimentConfig& cfg, const Suite& suite);

// Eroded and boundary-jittered copy of `target`; never empty.
BinaryMask perturb_segment(const BinaryMask& target, const PerturbationSpec& spec,
                           std::uint64_t seed);

// Writes <stem>.csv (records), <stem>_cells.csv, <stem>_table.csv and
// <stem>_summary.json into cfg.out.
void write_sweep(const ExperimentConfig& cfg, const SweepResult& result, const std::string& stem);

// Input / d=-2 / d=0 / d=+2 / ground-truth panel and one offset map plus
// contour overlay per render alpha. Returns the render summary.
nlohmann::json render_figures(const ExperimentConfig& cfg, const Suite& suite);

// Background segments with the pasted object as a new class-1 segment on top.
LabelMap composite_labels(const LabelMap& background, const BinaryMask& pasted);

struct EvalOneInput {
  Image input;
  BinaryMask target;
  LabelMap labels;
  std::optional<Image> ground_truth;
  double alpha = 0.03;
};

// Segment preview (PNG + JSON legend), expanded mask, inpainted image and a
// result JSON in cfg.out. Returns the result JSON.
nlohmann::json run_eval_one(const ExperimentConfig& cfg, const EvalOneInput& in);
EvalOneInput eval_input_from_suite(const Suite& suite, std::size_t index, double alpha);

// Process exit code for an error kind: 2 config, 3 data, 4 degenerate sweep.
int exit_code(ErrorKind kind);

}  // namespace maskopt
