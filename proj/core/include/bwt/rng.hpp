#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bwt {

// SplitMix64. One fixed generator everywhere so a seed maps to the same
// permutation/mask on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Unbiased draw in [0, n) by rejection sampling.
  std::uint64_t bounded(std::uint64_t n);

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Box-Muller, cosine branch only; consumes two words per value.
  double gaussian(double sigma);

 private:
  std::uint64_t state_;
};

// Fisher-Yates permutation of {0,...,n-1}, seeded stream.
std::vector<std::uint32_t> gen_permutation(std::uint64_t seed, std::size_t n);

// Binary vector of length n with exactly floor(n/2) ones, positions shuffled
// by the same Fisher-Yates procedure as gen_permutation.
std::vector<std::uint8_t> gen_binary_mask(std::uint64_t seed, std::size_t n);

}  // namespace bwt
