#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdint>

#include "bwt/image.hpp"
#include "bwt/rng.hpp"

using bwt::Rng;

namespace {

// Independent one-line SplitMix64 oracle (recomputed here, not shared with
// the implementation) plus a hand-traced Fisher-Yates.
struct OracleRng {
  std::uint64_t s;
  std::uint64_t next() {
    s += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t rem = (UINT64_MAX % n + 1) % n;
    std::uint64_t w = next();
    while (rem != 0 && w > UINT64_MAX - rem) w = next();
    return w % n;
  }
};

}  // namespace

TEST_CASE("splitmix64 reference vector") {
  Rng rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("successive outputs differ; equal seeds give equal streams") {
  Rng a(0), b(0);
  std::uint64_t prev = a.next();
  CHECK(a.next() != prev);
  Rng a2(12345), b2(12345);
  for (int i = 0; i < 10000; ++i) CHECK(a2.next() == b2.next());
  (void)b;
}

TEST_CASE("bounded: n=1 returns 0, fixed seed is reproducible") {
  Rng rng(7);
  CHECK(rng.bounded(1) == 0);
  Rng x(99), y(99);
  for (int i = 0; i < 100; ++i) CHECK(x.bounded(13) == y.bounded(13));
}

TEST_CASE("bounded: residues of n=7 are near-uniform over 1e6 draws") {
  Rng rng(2024);
  std::array<int, 7> counts{};
  const int n = 1000000;
  for (int i = 0; i < n; ++i) ++counts[rng.bounded(7)];
  for (int c : counts) {
    const double freq = static_cast<double>(c) / n;
    CHECK(freq == doctest::Approx(1.0 / 7).epsilon(0.01));
  }
}

TEST_CASE("gen_permutation: bijection for many seeds and sizes") {
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xFFFFFFFFFFFFFFFFULL}) {
    for (std::size_t n : {1, 2, 12, 48, 100}) {
      auto v = bwt::gen_permutation(seed, n);
      REQUIRE(v.size() == n);
      auto sorted = v;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < n; ++i) CHECK(sorted[i] == i);
    }
  }
}

TEST_CASE("gen_permutation matches a hand-traced Fisher-Yates, seed 42 n 4") {
  OracleRng oracle{42};
  std::array<std::uint32_t, 4> expect = {0, 1, 2, 3};
  for (std::size_t i = 3; i >= 1; --i) {
    std::swap(expect[i], expect[oracle.bounded(i + 1)]);
  }
  const auto got = bwt::gen_permutation(42, 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(got[i] == expect[i]);
}

TEST_CASE("gen_binary_mask: popcount is floor(n/2)") {
  auto popcount = [](const std::vector<std::uint8_t>& r) {
    std::size_t c = 0;
    for (auto b : r) c += b;
    return c;
  };
  CHECK(popcount(bwt::gen_binary_mask(5, 2)) == 1);
  CHECK(popcount(bwt::gen_binary_mask(5, 12)) == 6);
  CHECK(popcount(bwt::gen_binary_mask(5, 27)) == 13);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (std::size_t n : {1, 2, 3, 48, 99}) {
      CHECK(popcount(bwt::gen_binary_mask(seed, n)) == n / 2);
    }
  }
}

TEST_CASE("integer<->float pixel round trip exact for all 256 values") {
  bwt::ImageTensor img(1, 16, 16);
  for (int v = 0; v < 256; ++v) img.data[v] = v / 255.0;
  const bwt::IntImage q = bwt::quantize(img, 255);
  for (int v = 0; v < 256; ++v) CHECK(q.data[v] == v);
  const bwt::ImageTensor back = bwt::dequantize(q, 255);
  for (int v = 0; v < 256; ++v) CHECK(back.data[v] == img.data[v]);
}
