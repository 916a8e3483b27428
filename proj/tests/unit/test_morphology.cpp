#include "doctest.h"
#include "maskopt/distfield.hpp"
#include "maskopt/morphology.hpp"
#include "oracles.hpp"

using namespace maskopt;

TEST_CASE("dilation") {
  BinaryMask one(9, 9);
  one.at(4, 4) = 1;
  CHECK(dilate(one, 0) == one);
  CHECK(dilate(one, 2).count() == 13);
  CHECK(dilate(one, 2) == oracle::dilate(one, 2));
  CHECK(dilate(BinaryMask(4, 4), 3) == BinaryMask(4, 4));
  CHECK_THROWS_AS(dilate(one, -1), Error);

  Rng rng(41);
  for (int t = 0; t < 30; ++t) {
    const BinaryMask m = oracle::random_mask(rng, 14, 11, 0.05);
    for (double r : {0.5, 1.0, 1.5, 2.0, 3.3}) CHECK(dilate(m, r) == oracle::dilate(m, r));
    const BinaryMask a = dilate(m, 1.0), b = dilate(m, 2.5);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i]) CHECK(b[i]);
    }
  }
}

TEST_CASE("erosion") {
  BinaryMask sq(7, 7);
  for (int y = 1; y < 6; ++y) {
    for (int x = 1; x < 6; ++x) sq.at(y, x) = 1;
  }
  BinaryMask inner(7, 7);
  for (int y = 2; y < 5; ++y) {
    for (int x = 2; x < 5; ++x) inner.at(y, x) = 1;
  }
  CHECK(erode(sq, 0) == sq);
  CHECK(erode(sq, 1) == inner);

  Rng rng(43);
  for (int t = 0; t < 20; ++t) {
    const BinaryMask m = oracle::random_blobs(rng, 20, 20);
    for (double r : {1.0, 2.0, 3.0}) {
      const BinaryMask closed = erode(dilate(m, r), r);
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i]) CHECK(closed[i]);
      }
    }
  }
}

TEST_CASE("rescale") {
  Rng rng(47);
  const BinaryMask m = oracle::random_blobs(rng, 24, 24);
  CHECK(rescale_mask(m, 0) == m);
  CHECK(rescale_mask(m, 3) == dilate(m, 3));
  const BinaryMask back = rescale_mask(rescale_mask(m, 2), -2);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i]) CHECK(back[i]);
  }
  BinaryMask dot(5, 5);
  dot.at(2, 2) = 1;
  try {
    rescale_mask(dot, -1);
    FAIL("expected a degenerate-mask error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateMask);
  }
}

TEST_CASE("threshold of the signed field equals dilation") {
  Rng rng(53);
  for (int t = 0; t < 25; ++t) {
    const BinaryMask m = oracle::random_blobs(rng, 24, 24);
    const auto phi = signed_distance(m).field.data;
    for (double r : {1.0, 2.0, 4.0, 8.0}) {
      const BinaryMask d = dilate(m, r);
      for (std::size_t i = 0; i < phi.size(); ++i) CHECK((phi[i] <= r) == (d[i] != 0));
    }
  }
}
