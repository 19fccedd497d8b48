#include <doctest.h>

#include <algorithm>

#include "bwt/blocking.hpp"
#include "bwt/errors.hpp"
#include "bwt/rng.hpp"

using bwt::BlockImage;
using bwt::IntImage;

namespace {

IntImage random_image(int c, int w, int h, std::uint64_t seed) {
  IntImage img(c, w, h);
  bwt::Rng rng(seed);
  for (auto& v : img.data) v = static_cast<int>(rng.bounded(256));
  return img;
}

}  // namespace

TEST_CASE("segment: single block equals raster order") {
  IntImage img(3, 4, 4);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    img.data[i] = static_cast<int>(i);
  const BlockImage b = bwt::segment(img, 4);
  CHECK(b.block_cols == 1);
  CHECK(b.block_rows == 1);
  CHECK(b.block_pixels == 48);
  for (int k = 0; k < 48; ++k) CHECK(b.at(0, 0, k) == k);
}

TEST_CASE("segment: index arithmetic for M=2") {
  IntImage img(3, 4, 4);
  img.at(1, 2, 0) = 77;  // ch=1, x=2, y=0
  const BlockImage b = bwt::segment(img, 2);
  CHECK(b.block_cols == 2);
  CHECK(b.block_rows == 2);
  CHECK(b.block_pixels == 12);
  // block (1,0), k = (0*2+0)*3+1 = 1
  CHECK(b.at(1, 0, 1) == 77);
}

TEST_CASE("segment/integrate are mutually inverse") {
  for (int M : {2, 4, 8}) {
    for (int trial = 0; trial < 100; ++trial) {
      const IntImage img = random_image(3, 16, 16, trial * 31 + M);
      const IntImage back = bwt::integrate(bwt::segment(img, M));
      CHECK(back.data == img.data);
    }
  }
}

TEST_CASE("integrate then segment is the identity on block images") {
  for (int trial = 0; trial < 100; ++trial) {
    const IntImage img = random_image(3, 8, 8, trial);
    const BlockImage b = bwt::segment(img, 4);
    const BlockImage again = bwt::segment(bwt::integrate(b), 4);
    CHECK(again.data == b.data);
  }
}

TEST_CASE("segment preserves the pixel multiset") {
  const IntImage img = random_image(3, 16, 8, 5);
  const BlockImage b = bwt::segment(img, 4);
  auto a = img.data;
  auto c = b.data;
  std::sort(a.begin(), a.end());
  std::sort(c.begin(), c.end());
  CHECK(a == c);
}

TEST_CASE("segment rejects non-divisible dimensions") {
  const IntImage img(3, 10, 8);
  CHECK_THROWS_AS(bwt::segment(img, 3), bwt::DimensionError);
  CHECK_THROWS_AS(bwt::segment(img, 16), bwt::DimensionError);
}

TEST_CASE("zero image round trips to zero") {
  const IntImage img(3, 8, 8);
  const IntImage back = bwt::integrate(bwt::segment(img, 2));
  CHECK(std::all_of(back.data.begin(), back.data.end(),
                    [](int v) { return v == 0; }));
}
