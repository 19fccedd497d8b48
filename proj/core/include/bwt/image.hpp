#pragma once

#include <cstdint>
#include <vector>

namespace bwt {

/// Color image with unit-interval pixel values.
/// Storage is row-major with channels interleaved:
/// index(ch, x, y) = (y*width + x)*channels + ch.
struct ImageTensor {
  int channels = 0;
  int width = 0;
  int height = 0;
  std::vector<double> data;

  ImageTensor() = default;
  ImageTensor(int c, int w, int h)
      : channels(c), width(w), height(h),
        data(static_cast<std::size_t>(c) * w * h, 0.0) {}

  std::size_t size() const { return data.size(); }

  std::size_t index(int ch, int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + ch;
  }
  double& at(int ch, int x, int y) { return data[index(ch, x, y)]; }
  double at(int ch, int x, int y) const { return data[index(ch, x, y)]; }
};

/// Same layout, exact integer pixel values (255-scale, or 0..999 after FFX).
struct IntImage {
  int channels = 0;
  int width = 0;
  int height = 0;
  std::vector<int> data;

  IntImage() = default;
  IntImage(int c, int w, int h)
      : channels(c), width(w), height(h),
        data(static_cast<std::size_t>(c) * w * h, 0) {}

  std::size_t index(int ch, int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + ch;
  }
  int& at(int ch, int x, int y) { return data[index(ch, x, y)]; }
  int at(int ch, int x, int y) const { return data[index(ch, x, y)]; }
};

/// round(v * scale) per pixel; exact on the integer lattice.
IntImage quantize(const ImageTensor& img, int scale);

/// v / scale per pixel.
ImageTensor dequantize(const IntImage& img, int scale);

}  // namespace bwt
