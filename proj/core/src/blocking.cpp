#include "bwt/blocking.hpp"

#include <string>

#include "bwt/errors.hpp"

namespace bwt {

BlockImage segment(const IntImage& image, int M) {
  if (M < 1 || image.width % M != 0 || image.height % M != 0) {
    throw DimensionError("block size " + std::to_string(M) +
                         " does not divide image " +
                         std::to_string(image.width) + "x" +
                         std::to_string(image.height));
  }
  const int c = image.channels;
  BlockImage out(image.width / M, image.height / M, M, c);
  for (int j = 0; j < out.block_rows; ++j) {
    for (int i = 0; i < out.block_cols; ++i) {
      for (int row = 0; row < M; ++row) {
        for (int col = 0; col < M; ++col) {
          for (int ch = 0; ch < c; ++ch) {
            const int k = (row * M + col) * c + ch;
            out.at(i, j, k) = image.at(ch, i * M + col, j * M + row);
          }
        }
      }
    }
  }
  return out;
}

IntImage integrate(const BlockImage& blocks) {
  const int M = blocks.block_size;
  const int c = blocks.channels;
  if (M < 1 || blocks.block_pixels != M * M * c ||
      blocks.data.size() != static_cast<std::size_t>(blocks.block_cols) *
                                blocks.block_rows * blocks.block_pixels) {
    throw DimensionError("malformed block image");
  }
  IntImage out(c, blocks.block_cols * M, blocks.block_rows * M);
  for (int j = 0; j < blocks.block_rows; ++j) {
    for (int i = 0; i < blocks.block_cols; ++i) {
      for (int row = 0; row < M; ++row) {
        for (int col = 0; col < M; ++col) {
          for (int ch = 0; ch < c; ++ch) {
            const int k = (row * M + col) * c + ch;
            out.at(ch, i * M + col, j * M + row) = blocks.at(i, j, k);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace bwt
