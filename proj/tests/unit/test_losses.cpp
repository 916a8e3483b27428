#include <cmath>

#include "doctest.h"
#include "maskopt/losses.hpp"
#include "oracles.hpp"

using namespace maskopt;

namespace {

SignedDistanceField row_field() {
  BinaryMask m(1, 5);
  m[2] = 1;
  return signed_distance(m);  // [2, 1, -1, 1, 2]
}

SoftMask center_indicator() {
  SoftMask m(1, 5, 0.0);
  m.set(2, 1.0);
  return m;
}

FeaturePyramid constant_pyramid(double c, int h, int w) {
  FeatureLevel l{1, h, w, std::vector<double>(static_cast<std::size_t>(h) * w, c)};
  return {{l}};
}

}  // namespace

TEST_CASE("boundary loss") {
  const auto sdf = row_field();
  CHECK(boundary_loss(sdf, SoftMask(1, 5, 0.0)) == 0.0);
  CHECK(boundary_loss(sdf, center_indicator()) == -1.0);
  CHECK(boundary_loss(sdf, SoftMask(1, 5, 1.0)) == 5.0);
}

TEST_CASE("mask expansion loss") {
  const auto sdf = row_field();
  const auto zero = mask_expansion_loss(sdf, SoftMask(1, 5, 0.0), 0.3);
  CHECK(zero.value == 0.0);
  for (std::size_t i = 0; i < 5; ++i) CHECK(zero.gradient.data[i] == sdf.field.data[i] - 0.3);
  CHECK(mask_expansion_loss(sdf, center_indicator(), 0.5).value == -1.5);
  CHECK_THROWS_AS(mask_expansion_loss(sdf, center_indicator(), -0.1), Error);

  Rng rng(61);
  for (int t = 0; t < 100; ++t) {
    const BinaryMask b = oracle::random_blobs(rng, 8, 9);
    const auto f = signed_distance(b);
    RealGrid g(8, 9);
    for (auto& v : g.data) v = rng.uniform();
    const SoftMask m(g);
    CHECK(mask_expansion_loss(f, m, 0.0).value == boundary_loss(f, m));
  }
}

TEST_CASE("soft mask range") {
  RealGrid g(1, 2);
  g.data = {0.5, 1.5};
  CHECK_THROWS_AS(SoftMask{g}, Error);
  SoftMask m(1, 2);
  m.set(0, 3.0);
  m.set(1, -1.0);
  CHECK(m[0] == 1.0);
  CHECK(m[1] == 0.0);
}

TEST_CASE("reconstruction loss") {
  const Image a(4, 4, 1, 0.25f);
  CHECK(reconstruction_loss(a, a, 3) == 0.0);
  Image b = a;
  b.at(0, 0) += 0.5f;
  b.at(3, 2) += 0.5f;
  CHECK(reconstruction_loss(a, b, 2) == 0.5);
  CHECK(reconstruction_loss(a, b, 4) == 0.25);
  CHECK_THROWS_AS(reconstruction_loss(a, b, 0), Error);
}

TEST_CASE("gram and style") {
  const auto g = gram(constant_pyramid(0.75, 3, 5).levels[0]);
  REQUIRE(g.size() == 1);
  CHECK(g[0] == doctest::Approx(0.75 * 0.75).epsilon(1e-15));
  Rng rng(67);
  FeatureLevel l{3, 4, 5, {}};
  for (std::size_t i = 0; i < l.element_count(); ++i) l.data.push_back(rng.uniform(-1, 1));
  const auto s = gram(l);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(s[i * 3 + j] == s[j * 3 + i]);
  }
  FeatureLevel z{2, 3, 3, std::vector<double>(18, 0.0)};
  CHECK(gram(z) == std::vector<double>(4, 0.0));

  const auto one = constant_pyramid(1.0, 6, 7);
  const auto two = constant_pyramid(2.0, 6, 7);
  CHECK(style_loss(one, one) == 0.0);
  CHECK(style_loss(one, two) == 3.0);
  CHECK(style_loss(two, one) == style_loss(one, two));
}

TEST_CASE("feature matching") {
  const auto a = constant_pyramid(0.5, 2, 2);
  const auto b = constant_pyramid(0.75, 2, 2);
  CHECK(feature_matching_loss(a, a) == 0.0);
  CHECK(feature_matching_loss(a, b) == 0.25);
  Rng rng(71);
  const Image x = oracle::random_image(rng, 16, 16, 3);
  const Image y = oracle::random_image(rng, 16, 16, 3);
  CHECK(feature_matching_loss(handcrafted_pyramid(x), handcrafted_pyramid(y)) >= 0.0);
  CHECK(handcrafted_pyramid(x).levels.size() == 3);
}

TEST_CASE("hinge losses") {
  CHECK(hinge_gan_losses({{0.3, 0.3}}, {{0.7, 0.7, 0.7}}).generator == doctest::Approx(-0.7));
  CHECK(hinge_gan_losses({{1.0, 1.0}}, {{-1.0, -1.0}}).discriminator == 0.0);
  CHECK(hinge_gan_losses({{0.0}}, {{0.0}}).discriminator == 2.0);
}

TEST_CASE("pixelwise cross entropy") {
  LabelMap gt(1, 2);
  gt.at(0, 1) = 1;
  gt.class_table() = {{0, 0}, {1, 1}};
  CHECK(pixelwise_cross_entropy({1, 2, 2, {1, 0, 0, 1}}, gt) == 0.0);
  CHECK(pixelwise_cross_entropy({1, 2, 2, {0.5, 0.5, 0.5, 0.5}}, gt) == doctest::Approx(std::log(2.0)));
  CHECK(pixelwise_cross_entropy({1, 2, 2, {0.5, 0.5, 0.75, 0.25}}, gt) ==
        doctest::Approx((std::log(2.0) + std::log(4.0)) / 2));
}

TEST_CASE("weighted totals") {
  const LossWeights w;
  LossTerms none;
  for (const char* n : {"L_PS", "L_EG", "L_EF", "L_SG", "L_SC", "L_IG", "L_IF", "L_IS", "L_IR", "L_X"}) {
    none.set(n, 0.0);
  }
  CHECK(total_loss(none, w) == 0.0);

  LossTerms e;
  e.set("L_EG", 0.5).set("L_EF", 0.1);
  CHECK(edge_inpainter_loss(e, w) == doctest::Approx(1.5).epsilon(1e-15));

  LossTerms x;
  x.set("L_X", 0.002).mark_absent("L_PS").mark_absent("L_E").mark_absent("L_S").mark_absent("L_I");
  CHECK(total_loss(x, w) == doctest::Approx(2.0).epsilon(1e-15));

  LossTerms missing;
  missing.set("L_EG", 1.0);
  CHECK_THROWS_AS(edge_inpainter_loss(missing, w), Error);
}

TEST_CASE("loss weights json") {
  nlohmann::json j = LossWeights{};
  CHECK(j.get<LossWeights>() == LossWeights{});
  const auto partial = nlohmann::json{{"lambda_X", 10.0}}.get<LossWeights>();
  CHECK(partial.lambda_X == 10.0);
  CHECK(partial.lambda_EF == 10.0);
  CHECK_THROWS_AS((nlohmann::json{{"lambda_X", "big"}}.get<LossWeights>()), Error);
}
