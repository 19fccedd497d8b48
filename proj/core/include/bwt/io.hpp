#pragma once

#include <string>

#include "bwt/dataset.hpp"
#include "bwt/image.hpp"

namespace bwt {

/// Binary PPM (P6), 8-bit, maxval 255. Header comments and arbitrary
/// whitespace are handled; anything else throws FormatError.
ImageTensor load_ppm(const std::string& path);

/// Canonical P6 writer: "P6\n<w> <h>\n255\n" + RGB bytes. Unit-interval
/// values are clamped and rounded half-up to 8 bits.
void save_ppm(const ImageTensor& image, const std::string& path);

/// CIFAR-10 binary batch: records of 1 label byte + 3072 channel-planar
/// pixel bytes. File size must be a multiple of 3073.
Dataset load_cifar_bin(const std::string& path);

/// Directory of .ppm files named "<label>_*.ppm" (sorted by filename).
Dataset load_ppm_dir(const std::string& path);

}  // namespace bwt
