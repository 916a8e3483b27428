#include <cmath>

#include "doctest.h"
#include "maskopt/mask_pipeline.hpp"
#include "maskopt/morphology.hpp"
#include "oracles.hpp"

using namespace maskopt;

namespace {

LabelMap two_segments(int h, int w, std::uint32_t a, std::uint32_t b, int split) {
  LabelMap l(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) l.at(y, x) = x < split ? a : b;
  }
  return l;
}

SignedDistanceField row_field() {
  BinaryMask m(1, 5);
  m[2] = 1;
  return signed_distance(m);
}

}  // namespace

TEST_CASE("segment selection") {
  BinaryMask target(10, 10);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 5; ++x) target.at(y, x) = 1;
  }
  LabelMap same(10, 10);
  for (std::size_t i = 0; i < target.size(); ++i) same.ids()[i] = target[i];
  CHECK(select_segment(same, target) == target);

  // Overlaps 10 and 40.
  LabelMap ab(10, 10);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) ab.at(y, x) = x == 0 ? 1 : (x < 5 ? 2 : 0);
  }
  CHECK(select_segment_id(ab, target) == 2);

  // Equal overlap of 25 pixels for ids 3 and 7.
  BinaryMask t2(10, 10);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 10; ++x) t2.at(y, x) = 1;
  }
  CHECK(select_segment_id(two_segments(10, 10, 7, 3, 5), t2) == 3);
  CHECK(select_segment_id(two_segments(10, 10, 3, 7, 5), t2) == 3);

  BinaryMask empty(10, 10);
  CHECK_THROWS_AS(select_segment_id(same, empty), Error);
}

TEST_CASE("projected descent") {
  const auto sdf = row_field();
  const BinaryMask out = binarize(optimize_soft_mask(sdf, SoftMask(1, 5, 0.3), 1.5, 50, 0.5));
  BinaryMask want(1, 5);
  want[1] = want[2] = want[3] = 1;
  CHECK(out == want);

  Rng rng(73);
  for (int t = 0; t < 20; ++t) {
    const BinaryMask m = oracle::random_blobs(rng, 12, 12);
    const auto f = signed_distance(m);
    // alpha = 0, init = target: the target is a fixed point.
    CHECK(binarize(optimize_soft_mask(f, SoftMask::from_mask(m), 0.0, 5, 0.1)) == m);

    // Loss never increases.
    RealGrid g(12, 12);
    for (auto& v : g.data) v = rng.uniform();
    const auto trace = optimize_soft_mask_traced(f, SoftMask(g), 1.5, 30, 0.05);
    for (std::size_t k = 1; k < trace.loss.size(); ++k) CHECK(trace.loss[k] <= trace.loss[k - 1]);

    // Alpha strictly between integer-root distances, so phi != alpha everywhere.
    const double alpha = 1.7;
    double gap = 1e9;
    for (double v : f.field.data) gap = std::min(gap, std::abs(v - alpha));
    const double step = 0.25;
    const int steps = static_cast<int>(std::ceil(1.0 / (step * gap)));
    RealGrid g2(12, 12);
    for (auto& v : g2.data) v = rng.uniform();
    const auto from_zero = optimize_soft_mask(f, SoftMask(12, 12, 0.0), alpha, steps, step);
    const auto from_rand = optimize_soft_mask(f, SoftMask(g2), alpha, steps, step);
    CHECK(from_zero.grid().data == from_rand.grid().data);
    CHECK(binarize(from_zero) == expansion_minimizer(f, alpha));
  }
}

TEST_CASE("descent argument errors") {
  const auto sdf = row_field();
  CHECK_THROWS_AS(optimize_soft_mask(sdf, SoftMask(1, 5), 0.1, 0, 0.1), Error);
  CHECK_THROWS_AS(optimize_soft_mask(sdf, SoftMask(1, 5), 0.1, 3, 0.0), Error);
  CHECK_THROWS_AS(optimize_soft_mask(sdf, SoftMask(1, 4), 0.1, 3, 0.1), Error);
  auto bad = sdf;
  bad.field.data[0] = std::nan("");
  CHECK_THROWS_AS(optimize_soft_mask(bad, SoftMask(1, 5), 0.1, 3, 0.1), Error);
}

TEST_CASE("binarize convention") {
  CHECK(binarize(SoftMask(3, 3, 0.0)) == BinaryMask(3, 3));
  CHECK(binarize(SoftMask(3, 3, 1.0)) == BinaryMask(3, 3, true));
  CHECK(binarize(SoftMask(3, 3, 0.5)) == BinaryMask(3, 3, true));
  CHECK_THROWS_AS(binarize(SoftMask(1, 1), 1.0), Error);
}

TEST_CASE("expansion for inpainting") {
  Rng rng(79);
  for (int t = 0; t < 100; ++t) {
    const BinaryMask seg = oracle::random_blobs(rng, 20, 24);
    LabelMap labels(20, 24);
    for (std::size_t i = 0; i < seg.size(); ++i) labels.ids()[i] = seg[i];
    labels.class_table() = {{0, 0}, {1, 1}};
    const double alpha = rng.uniform(0.0, 0.3);
    const Expansion ex = expand_for_inpainting(labels, seg, alpha);
    CHECK(ex.segment_id == 1);
    CHECK(ex.radius_px == doctest::Approx(alpha_to_pixels(seg, alpha, AlphaUnits::Normalized)));
    CHECK(ex.mask == dilate(seg, ex.radius_px));
    CHECK(expand_for_inpainting(labels, seg, 0.0).mask == seg);
    CHECK(expand_for_inpainting(labels, seg, alpha + 0.05).mask.count() >= ex.mask.count());
    CHECK(expand_segment(seg, 2.0, AlphaUnits::Pixels).mask == dilate(seg, 2.0));
  }
}

TEST_CASE("segment override") {
  LabelMap l = two_segments(6, 6, 0, 1, 3);
  l.class_table() = {{0, 0}, {1, 1}};
  BinaryMask t(6, 6);
  t.at(0, 5) = 1;
  CHECK(expand_for_inpainting(l, t, 0.0).segment_id == 1);
  CHECK(expand_for_inpainting(l, t, 0.0, AlphaUnits::Normalized, 0u).segment_id == 0);
  CHECK_THROWS_AS(expand_for_inpainting(l, t, 0.0, AlphaUnits::Normalized, 5u), Error);
}

TEST_CASE("scaling invariance of the minimizer") {
  Rng rng(83);
  for (int t = 0; t < 20; ++t) {
    const auto f = signed_distance(oracle::random_blobs(rng, 16, 16));
    auto g = f;
    for (auto& v : g.field.data) v *= 0.37;
    const double a = rng.uniform(0, 4);
    CHECK(expansion_minimizer(f, a) == expansion_minimizer(g, a * 0.37));
  }
}

TEST_CASE("coverage statistics") {
  BinaryMask target(20, 20);
  for (int y = 5; y < 15; ++y) {
    for (int x = 4; x < 16; ++x) target.at(y, x) = 1;
  }
  const auto same = coverage_stats(target, target);
  CHECK(same.missed == 0);
  CHECK(same.excess == 0);
  CHECK(same.iou == 1.0);
  CHECK(same.covered);
  const auto grown = coverage_stats(dilate(target, 2), target);
  CHECK(grown.missed == 0);
  CHECK(grown.excess > 0);
  CHECK(grown.covered);
  const auto shrunk = coverage_stats(erode(target, 2), target);
  CHECK(shrunk.missed > 0);
  CHECK_FALSE(shrunk.covered);
  CHECK_THROWS_AS(coverage_stats(BinaryMask(3, 3), BinaryMask(3, 3)), Error);
}
