#include "bwt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bwt/rng.hpp"

namespace bwt {

namespace {

constexpr int kClasses = 10;
constexpr int kChannels = 3;

ImageTensor make_sample(int label, int width, int height, double sigma,
                        Rng& rng) {
  const double freq = 1.0 + label;
  const double theta = label * std::numbers::pi / kClasses;
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  ImageTensor img(kChannels, width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double base =
          0.5 + 0.4 * std::sin(2.0 * std::numbers::pi * freq *
                               (x * ct + y * st) / width);
      for (int ch = 0; ch < kChannels; ++ch) {
        const double noise = sigma > 0.0 ? rng.gaussian(sigma) : 0.0;
        img.at(ch, x, y) = std::clamp(base + noise, 0.0, 1.0);
      }
    }
  }
  return img;
}

Dataset make_split(int n, int width, int height, double sigma, Rng& rng) {
  Dataset ds;
  ds.images.reserve(n);
  ds.labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int label = i % kClasses;
    ds.images.push_back(make_sample(label, width, height, sigma, rng));
    ds.labels.push_back(label);
  }
  return ds;
}

}  // namespace

std::pair<Dataset, Dataset> synth_dataset(std::uint64_t seed, int n_train,
                                          int n_test, int width, int height,
                                          double noise_sigma) {
  Rng rng(seed);
  Dataset train = make_split(n_train, width, height, noise_sigma, rng);
  Dataset test = make_split(n_test, width, height, noise_sigma, rng);
  return {std::move(train), std::move(test)};
}

}  // namespace bwt
