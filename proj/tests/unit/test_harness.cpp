#include <sstream>

#include "doctest.h"
#include "maskopt/harness.hpp"
#include "maskopt/morphology.hpp"
#include "maskopt/rng.hpp"

using namespace maskopt;
using nlohmann::json;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.generation.height = 48;
  cfg.generation.width = 48;
  cfg.generation.n = 8;
  cfg.generation.sources = 6;
  cfg.diffusion.iterations = 100;
  cfg.seed = 5;
  return cfg;
}

ErrorKind kind_of(const json& j) {
  try {
    config_from_json(j);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = config_from_json(json::object());
  CHECK(cfg.d_values == std::vector<int>{-2, 0, 2, 4, 6, 8});
  CHECK(cfg.alpha_values.size() == 5);
  CHECK(cfg.loss_weights == LossWeights{});
  const auto round = config_from_json(config_to_json(small_config()));
  CHECK(round.generation.n == 8);
  CHECK(round.diffusion.iterations == 100);

  CHECK(kind_of({{"backend", "magic"}}) == ErrorKind::Config);
  CHECK(kind_of({{"d_values", json::array()}}) == ErrorKind::Config);
  CHECK(kind_of({{"unknown", 1}}) == ErrorKind::Config);
  CHECK(kind_of({{"seed", "x"}}) == ErrorKind::Config);
  CHECK(kind_of({{"generation", {{"bins", {{10, 5}}}}}}) == ErrorKind::Config);
  CHECK(kind_of({{"loss_weights", {{"lambda_X", "x"}}}}) == ErrorKind::Config);
}

TEST_CASE("exit codes") {
  CHECK(exit_code(ErrorKind::Config) == 2);
  CHECK(exit_code(ErrorKind::Io) == 3);
  CHECK(exit_code(ErrorKind::NoOverlap) == 3);
  CHECK(exit_code(ErrorKind::Sweep) == 4);
}

TEST_CASE("dilation sweep layout") {
  auto cfg = small_config();
  const Suite suite = generate_suite(cfg);
  cfg.d_values = {0};
  const auto one = run_dilation_sweep(cfg, suite);
  CHECK(one.table.conditions == std::vector<std::string>{"d=0"});
  CHECK(one.records.size() == suite.samples.size());
  for (const auto& r : one.records) {
    CHECK(r.coverage.missed == 0);
    CHECK(r.coverage.excess == 0);
  }

  cfg.d_values = {-2, 0, 2, 4, 6, 8};
  const auto full = run_dilation_sweep(cfg, suite);
  std::ostringstream wide;
  write_wide_table_csv(wide, full.table);
  std::istringstream lines(wide.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "metric,bin,d=-2,d=0,d=+2,d=+4,d=+6,d=+8");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 8);  // 2 metrics x 4 bins
  for (const auto& r : full.records) CHECK(find_bin(suite.bins, r.mask_ratio)->label() == r.bin);
}

TEST_CASE("degenerate erosion excludes the whole sample") {
  auto cfg = small_config();
  Suite suite;
  suite.bins = default_bins();
  SampleTriplet t;
  t.input = Image(32, 32, 3, 0.5f);
  t.ground_truth = t.input;
  t.mask = BinaryMask(32, 32);
  t.mask.at(10, 10) = 1;
  t.mask_ratio = mask_ratio(t.mask);
  suite.samples = {t};
  suite.ids = {"000000"};
  try {
    run_dilation_sweep(cfg, suite);
    FAIL("expected a sweep error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Sweep);
  }
  SampleTriplet big = t;
  for (int y = 5; y < 20; ++y) {
    for (int x = 5; x < 20; ++x) big.mask.at(y, x) = 1;
  }
  big.mask_ratio = mask_ratio(big.mask);
  suite.samples.push_back(big);
  suite.ids.push_back("000001");
  const auto res = run_dilation_sweep(cfg, suite);
  CHECK(res.records.size() == cfg.d_values.size());
  CHECK(res.summary["excluded"] == json::array({"000000"}));
}

TEST_CASE("alpha sweep with alpha zero uses the perturbed segment") {
  auto cfg = small_config();
  const Suite suite = generate_suite(cfg);
  cfg.alpha_values = {0.0};
  const auto res = run_alpha_sweep(cfg, suite);
  REQUIRE(res.records.size() == suite.samples.size());
  for (std::size_t i = 0; i < suite.samples.size(); ++i) {
    const auto& t = suite.samples[i];
    const BinaryMask seg = perturb_segment(t.mask, cfg.perturbation, mix_seed(t.seed, 1));
    const auto cov = coverage_stats(seg, t.mask);
    CHECK(res.records[i].coverage.missed == cov.missed);
    CHECK(res.records[i].coverage.excess == cov.excess);
  }
}

TEST_CASE("contrast and render structure") {
  auto cfg = small_config();
  cfg.out = std::filesystem::temp_directory_path() / "maskopt_unit_harness";
  std::filesystem::remove_all(cfg.out);
  const Suite suite = generate_suite(cfg);
  const auto c = run_mask_family_contrast(cfg, suite);
  CHECK(c.table.conditions == std::vector<std::string>{"object", "random"});
  CHECK(c.summary["max_ratio_gap"].get<double>() <= 2.0);
  CHECK(c.summary["deltas"].size() == 4);

  const auto r = render_figures(cfg, suite);
  CHECK(r["panel"].size() == 5);
  CHECK(r["offset_maps"].size() == 4);
  const auto& maps = r["offset_maps"];
  CHECK(maps[3]["zero_contour_area"].get<std::size_t>() > maps[0]["zero_contour_area"].get<std::size_t>());
  for (const auto& m : maps) CHECK(std::filesystem::exists(cfg.out / m["offset"].get<std::string>()));
  CHECK(std::filesystem::exists(cfg.out / "dilation_panel.png"));
}

TEST_CASE("eval-one") {
  auto cfg = small_config();
  cfg.out = std::filesystem::temp_directory_path() / "maskopt_unit_eval";
  const Suite suite = generate_suite(cfg);
  const auto in = eval_input_from_suite(suite, 0, 0.03);
  const auto res = run_eval_one(cfg, in);
  CHECK(in.labels.class_of(res["segment_id"].get<std::uint32_t>()) == 1);
  CHECK(res["coverage"]["covered"].get<bool>());
  CHECK(std::filesystem::exists(cfg.out / "eval_segments.png"));
  CHECK(std::filesystem::exists(cfg.out / "eval_segments.json"));

  cfg.segment_id = 0;
  CHECK(run_eval_one(cfg, in)["segment_id"] == 0);
}
