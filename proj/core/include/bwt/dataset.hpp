#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bwt/image.hpp"

namespace bwt {

struct Dataset {
  std::vector<ImageTensor> images;
  std::vector<int> labels;

  std::size_t size() const { return images.size(); }
};

/// Deterministic 10-class dataset of oriented sinusoid gratings:
/// class k has frequency 1+k and angle k*pi/10; pixels get Gaussian noise
/// (sigma 0.05) from a single SplitMix64 stream, so a seed fixes every bit.
std::pair<Dataset, Dataset> synth_dataset(std::uint64_t seed, int n_train,
                                          int n_test, int width, int height,
                                          double noise_sigma = 0.05);

}  // namespace bwt
