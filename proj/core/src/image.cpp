#include "bwt/image.hpp"

#include <cmath>

namespace bwt {

IntImage quantize(const ImageTensor& img, int scale) {
  IntImage out(img.channels, img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    out.data[i] = static_cast<int>(std::llround(img.data[i] * scale));
  }
  return out;
}

ImageTensor dequantize(const IntImage& img, int scale) {
  ImageTensor out(img.channels, img.width, img.height);
  // divide rather than multiplying by a reciprocal so that dequantize is the
  // exact inverse of quantize on representative values (v / scale)
  const double s = static_cast<double>(scale);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    out.data[i] = img.data[i] / s;
  }
  return out;
}

}  // namespace bwt
