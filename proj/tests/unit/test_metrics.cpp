#include <cmath>
#include <sstream>

#include "doctest.h"
#include "maskopt/metrics.hpp"
#include "oracles.hpp"

using namespace maskopt;

TEST_CASE("psnr") {
  const Image a(8, 8, 3, 0.2f);
  CHECK(psnr(a, a) == kPsnrInfinity);
  Image c(8, 8, 3, 0.35f);
  CHECK(psnr(Image(8, 8, 3, 0.25f), c) == doctest::Approx(20.0).epsilon(1e-6));
  CHECK(psnr(Image(4, 4, 1, 0.0f), Image(4, 4, 1, 0.5f)) == doctest::Approx(6.020599913279624).epsilon(1e-12));
  Rng rng(109);
  const Image x = oracle::random_image(rng, 9, 9, 1);
  const Image y = oracle::random_image(rng, 9, 9, 1);
  CHECK(psnr(x, y) == psnr(y, x));
  CHECK_THROWS_AS(psnr(x, Image(9, 8, 1)), Error);
}

TEST_CASE("ssim") {
  Rng rng(113);
  const Image a = oracle::random_image(rng, 16, 16, 3);
  CHECK(ssim(a, a) == 1.0);
  CHECK(ssim(Image(16, 16, 1, 0.5f), Image(16, 16, 1, 0.5f)) == 1.0);
  for (int t = 0; t < 5; ++t) {
    const Image x = oracle::random_image(rng, 16, 16, 1);
    const Image y = oracle::random_image(rng, 16, 16, 1);
    CHECK(std::abs(ssim(x, y) - oracle::ssim(x, y)) <= 1e-6);
    CHECK(ssim(x, y) == doctest::Approx(ssim(y, x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(ssim(Image(10, 16, 1), Image(10, 16, 1)), Error);
}

TEST_CASE("bins") {
  const auto bins = default_bins();
  CHECK(find_bin(bins, 0.0)->label() == "0-10");
  CHECK(find_bin(bins, 10.0)->label() == "10-20");
  CHECK(find_bin(bins, 39.99)->label() == "30-40");
  CHECK_FALSE(find_bin(bins, 40.0).has_value());
}

TEST_CASE("aggregation") {
  CHECK_THROWS_AS(aggregate({}), Error);
  MetricsRecord r{"000000", 5.0, "0-10", "d=0", 20.0, 0.9, {1, 2, 0.5, false}};
  const auto one = aggregate({r});
  const auto* c = one.find("d=0", "0-10");
  REQUIRE(c);
  CHECK(c->count == 1);
  CHECK(c->psnr_mean == 20.0);
  CHECK(c->ssim_mean == 0.9);
  CHECK(c->iou_mean == 0.5);

  MetricsRecord r2 = r;
  r2.psnr = 30.0;
  CHECK(aggregate({r, r2}).find("d=0", "0-10")->psnr_mean == 25.0);

  MetricsRecord inf = r;
  inf.psnr = kPsnrInfinity;
  const auto* ci = aggregate({r, inf}).find("d=0", "0-10");
  CHECK(ci->psnr_mean == 20.0);
  CHECK(ci->psnr_inf_count == 1);

  MetricsRecord far = r;
  far.bin = "30-40";
  far.mask_ratio = 35.0;
  std::ostringstream wide;
  write_wide_table_csv(wide, aggregate({r, far}));
  CHECK(wide.str() ==
        "metric,bin,d=0\n"
        "psnr,0-10,20.000000\npsnr,30-40,20.000000\n"
        "ssim,0-10,0.900000\nssim,30-40,0.900000\n");
}

TEST_CASE("record csv") {
  MetricsRecord r{"000001", 12.5, "10-20", "alpha=0.03", kPsnrInfinity, 1.0, {0, 3, 0.25, true}};
  std::ostringstream out;
  write_records_csv(out, {r});
  CHECK(out.str() ==
        "sample_id,condition,bin,mask_ratio,psnr,ssim,missed,excess,iou\n"
        "000001,alpha=0.03,10-20,12.500000,inf,1.000000,0,3,0.250000\n");
}
