#include "bwt/rng.hpp"

#include <cmath>
#include <numbers>

namespace bwt {

std::uint64_t Rng::bounded(std::uint64_t n) {
  // 2^64 mod n; words >= 2^64 - rem would bias the low residues.
  const std::uint64_t rem = (UINT64_MAX % n + 1) % n;
  std::uint64_t w = next();
  while (rem != 0 && w > UINT64_MAX - rem) w = next();
  return w % n;
}

double Rng::gaussian(double sigma) {
  const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0,1]
  const double u2 = uniform01();
  return sigma * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

template <typename T>
void fisher_yates(std::vector<T>& a, Rng& rng) {
  for (std::size_t i = a.size() - 1; i >= 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.bounded(i + 1));
    std::swap(a[i], a[j]);
  }
}

}  // namespace

std::vector<std::uint32_t> gen_permutation(std::uint64_t seed, std::size_t n) {
  std::vector<std::uint32_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::uint32_t>(i);
  if (n > 1) {
    Rng rng(seed);
    fisher_yates(v, rng);
  }
  return v;
}

std::vector<std::uint8_t> gen_binary_mask(std::uint64_t seed, std::size_t n) {
  std::vector<std::uint8_t> r(n, 0);
  for (std::size_t i = 0; i < n / 2; ++i) r[i] = 1;
  if (n > 1) {
    Rng rng(seed);
    fisher_yates(r, rng);
  }
  return r;
}

}  // namespace bwt
