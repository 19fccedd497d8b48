#pragma once

#include <vector>

#include "bwt/image.hpp"

namespace bwt {

/// Block-segmented image. Block (i, j) covers the M x M x c region whose
/// top-left pixel is (i*M, j*M). Within a block the flattening index is
/// k = (row*M + col)*c + ch (row-major, channel fastest), so a pixel's
/// channels stay adjacent.
struct BlockImage {
  int block_cols = 0;    // w / M
  int block_rows = 0;    // h / M
  int block_pixels = 0;  // M*M*c
  int block_size = 0;    // M
  int channels = 0;
  std::vector<int> data;  // block_rows x block_cols x block_pixels

  BlockImage() = default;
  BlockImage(int cols, int rows, int M, int c)
      : block_cols(cols), block_rows(rows), block_pixels(M * M * c),
        block_size(M), channels(c),
        data(static_cast<std::size_t>(cols) * rows * M * M * c, 0) {}

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(j) * block_cols + i) * block_pixels + k;
  }
  int& at(int i, int j, int k) { return data[index(i, j, k)]; }
  int at(int i, int j, int k) const { return data[index(i, j, k)]; }
};

/// Split into M x M blocks. Throws DimensionError unless M divides both sides.
BlockImage segment(const IntImage& image, int M);

/// Exact inverse of segment.
IntImage integrate(const BlockImage& blocks);

}  // namespace bwt
