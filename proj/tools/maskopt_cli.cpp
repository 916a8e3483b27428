#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "maskopt/harness.hpp"
#include "maskopt/image_io.hpp"

using namespace maskopt;

namespace {

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string backend;
  std::optional<int> jobs;
  std::optional<std::uint32_t> segment_id;
  bool masked_only = false;
  std::string alpha_units;
};

ExperimentConfig resolve(const GlobalFlags& g) {
  ExperimentConfig cfg = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out.empty()) cfg.out = g.out;
  if (!g.backend.empty()) cfg.backend = parse_backend(g.backend);
  if (g.jobs) cfg.jobs = *g.jobs;
  if (g.segment_id) cfg.segment_id = g.segment_id;
  if (g.masked_only) cfg.masked_only = true;
  if (!g.alpha_units.empty()) cfg.alpha_units = parse_alpha_units(g.alpha_units);
  cfg.validate();
  return cfg;
}

void print_summary(const std::string& what, const SweepResult& r) {
  std::cout << what << ": " << r.records.size() << " records\n" << r.summary.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mask expansion and inpainting experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config, "JSON experiment config");
  app.add_option("--seed", g.seed, "Base seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--backend", g.backend, "Inpainting backend")
      ->check(CLI::IsMember({"diffusion", "fmm"}));
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--segment-id", g.segment_id, "Use this segment instead of the largest overlap");
  app.add_flag("--masked-only", g.masked_only, "Score only the inpainted region");
  app.add_option("--alpha-units", g.alpha_units, "Units of alpha")
      ->check(CLI::IsMember({"normalized", "pixels"}));

  std::optional<std::size_t> n;
  auto* synth = app.add_subcommand("synth", "Generate the paired dataset");
  synth->add_option("--n", n, "Number of samples");

  app.add_subcommand("sweep-dilate", "Inpainting quality versus mask dilation/erosion");
  app.add_subcommand("sweep-alpha", "Inpainting quality versus expansion offset alpha");
  app.add_subcommand("contrast-masks", "Object masks versus random masks of matched ratio");

  std::optional<std::size_t> render_sample;
  auto* render = app.add_subcommand("render", "Dilation panel and offset maps for one sample");
  render->add_option("--sample", render_sample, "Sample index");

  std::size_t eval_sample = 0;
  double eval_alpha = 0.03;
  std::string eval_image, eval_target, eval_labels, eval_gt;
  auto* eval = app.add_subcommand("eval-one", "Select, expand and inpaint one image");
  eval->add_option("--sample", eval_sample, "Sample index in the suite");
  eval->add_option("--alpha", eval_alpha, "Expansion offset");
  eval->add_option("--image", eval_image, "Input PNG (instead of a suite sample)");
  eval->add_option("--target", eval_target, "Target mask PNG");
  eval->add_option("--labels", eval_labels, "Segment id PNG with JSON sidecar");
  eval->add_option("--gt", eval_gt, "Ground-truth PNG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig cfg = resolve(g);
    if (*synth) {
      if (n) cfg.generation.n = *n;
      const Suite suite = generate_suite(cfg);
      write_dataset(cfg.out, suite.samples, suite.bins, cfg.seed);
      std::cout << "wrote " << suite.samples.size() << " samples to " << cfg.out << "\n";
    } else if (app.got_subcommand("sweep-dilate")) {
      const auto r = run_dilation_sweep(cfg, prepare_suite(cfg));
      write_sweep(cfg, r, "sweep_dilation");
      print_summary("sweep-dilate", r);
    } else if (app.got_subcommand("sweep-alpha")) {
      const auto r = run_alpha_sweep(cfg, prepare_suite(cfg));
      write_sweep(cfg, r, "sweep_alpha");
      print_summary("sweep-alpha", r);
    } else if (app.got_subcommand("contrast-masks")) {
      const auto r = run_mask_family_contrast(cfg, prepare_suite(cfg));
      write_sweep(cfg, r, "contrast_masks");
      print_summary("contrast-masks", r);
    } else if (*render) {
      if (render_sample) cfg.render_sample = *render_sample;
      std::cout << render_figures(cfg, prepare_suite(cfg)).dump(2) << "\n";
    } else if (*eval) {
      EvalOneInput in;
      if (!eval_image.empty()) {
        if (eval_target.empty() || eval_labels.empty()) {
          fail(ErrorKind::Config, "eval-one: --image needs --target and --labels");
        }
        in.input = io::load_image(eval_image);
        in.target = io::load_mask(eval_target);
        in.labels = io::load_label_map(eval_labels);
        if (!eval_gt.empty()) in.ground_truth = io::load_image(eval_gt);
        in.alpha = eval_alpha;
      } else {
        in = eval_input_from_suite(prepare_suite(cfg), eval_sample, eval_alpha);
      }
      std::cout << run_eval_one(cfg, in).dump(2) << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
