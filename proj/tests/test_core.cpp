#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "emo/core.hpp"

using namespace emo;

TEST_CASE("iou identity and disjoint cases") {
  BoundingBox a{0, 0, 10, 10};
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, {20, 20, 5, 5}) == 0.0);
}

TEST_CASE("iou half-overlap by hand") {
  // intersection 50, union 150
  CHECK(iou({0, 0, 10, 10}, {5, 0, 10, 10}) == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("iou degenerate boxes give zero") {
  CHECK(iou({0, 0, 0, 0}, {0, 0, 0, 0}) == 0.0);
  CHECK(iou({0, 0, 10, 0}, {0, 0, 10, 10}) == 0.0);
}

TEST_CASE("iou properties over random boxes") {
  std::mt19937_64 rng(7);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * (double(rng() >> 11) / 9007199254740992.0);
  };
  for (int i = 0; i < 500; ++i) {
    BoundingBox a{uni(-20, 80), uni(-20, 80), uni(0.1, 50), uni(0.1, 50)};
    BoundingBox b{uni(-20, 80), uni(-20, 80), uni(0.1, 50), uni(0.1, 50)};
    const double ab = iou(a, b);
    CHECK(ab == iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0 + 1e-12);
    // self-overlap of boxes at arbitrary coordinates is 1 up to rounding of
    // left+width vs the stored width
    CHECK(iou(a, a) == Catch::Approx(1.0).margin(1e-12));
  }
}

static GrayImage ramp_image(int w, int h) {
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = float(x + 100 * y);
  return img;
}

TEST_CASE("crop of full-image box copies the image") {
  const GrayImage img = ramp_image(6, 4);
  const GrayImage c = crop(img, {0, 0, 6, 4});
  REQUIRE(c.width == 6);
  REQUIRE(c.height == 4);
  CHECK(c.data == img.data);
}

TEST_CASE("crop clamps a box hanging past the right edge") {
  const GrayImage img = ramp_image(8, 5);
  const GrayImage c = crop(img, {5, 1, 10, 2});
  REQUIRE(c.width == 3);
  REQUIRE(c.height == 2);
  for (int y = 0; y < c.height; ++y)
    for (int x = 0; x < c.width; ++x) CHECK(c.at(x, y) == img.at(5 + x, 1 + y));
}

TEST_CASE("crop rounding keeps boundary pixels") {
  const GrayImage img = ramp_image(10, 10);
  // fractional box: floor(1.4)=1 .. ceil(1.4+2.2)=4
  const GrayImage c = crop(img, {1.4, 2.6, 2.2, 1.0});
  CHECK(c.width == 3);
  CHECK(c.height == 2);
}

TEST_CASE("crop fully outside throws EmptyCrop") {
  const GrayImage img = ramp_image(4, 4);
  CHECK_THROWS_AS(crop(img, {10, 10, 3, 3}), EmptyCrop);
  CHECK_THROWS_AS(crop(img, {-5, 0, 3, 3}), EmptyCrop);
}

TEST_CASE("crop with its own full box is idempotent") {
  const GrayImage img = ramp_image(7, 9);
  const GrayImage c1 = crop(img, {2, 3, 4, 5});
  const GrayImage c2 = crop(c1, {0, 0, double(c1.width), double(c1.height)});
  CHECK(c1.data == c2.data);
}
