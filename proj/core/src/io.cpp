#include "bwt/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "bwt/errors.hpp"

namespace bwt {

namespace {

// Reads one whitespace-delimited token, skipping '#' comments to end of line.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw FormatError("PPM: unexpected end of header");
  return tok;
}

int parse_dim(const std::string& tok) {
  try {
    const int v = std::stoi(tok);
    if (v <= 0) throw FormatError("PPM: non-positive dimension");
    return v;
  } catch (const std::exception&) {
    throw FormatError("PPM: bad header token '" + tok + "'");
  }
}

}  // namespace

ImageTensor load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open PPM file: " + path);
  if (next_token(in) != "P6") throw FormatError("PPM: missing P6 magic");
  const int w = parse_dim(next_token(in));
  const int h = parse_dim(next_token(in));
  const int maxval = parse_dim(next_token(in));
  if (maxval != 255) throw FormatError("PPM: only maxval 255 supported");
  // exactly one whitespace byte separates the header from the payload;
  // next_token already consumed it

  const std::size_t npix = static_cast<std::size_t>(w) * h * 3;
  std::vector<unsigned char> bytes(npix);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(npix));
  if (static_cast<std::size_t>(in.gcount()) != npix)
    throw FormatError("PPM: truncated pixel payload");

  ImageTensor img(3, w, h);
  std::size_t p = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        img.at(ch, x, y) = bytes[p++] / 255.0;
      }
    }
  }
  return img;
}

void save_ppm(const ImageTensor& image, const std::string& path) {
  if (image.channels != 3) throw FormatError("PPM: image must have 3 channels");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write PPM file: " + path);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  std::vector<unsigned char> bytes;
  bytes.reserve(image.size());
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        const double v = std::clamp(image.at(ch, x, y), 0.0, 1.0);
        bytes.push_back(
            static_cast<unsigned char>(std::floor(v * 255.0 + 0.5)));
      }
    }
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

Dataset load_cifar_bin(const std::string& path) {
  constexpr int kSide = 32;
  constexpr std::size_t kRecord = 1 + 3 * kSide * kSide;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open CIFAR file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.empty() || bytes.size() % kRecord != 0)
    throw FormatError("CIFAR file is empty or not a multiple of 3073 bytes");

  Dataset ds;
  const std::size_t n = bytes.size() / kRecord;
  ds.images.reserve(n);
  ds.labels.reserve(n);
  for (std::size_t rec = 0; rec < n; ++rec) {
    const unsigned char* p = bytes.data() + rec * kRecord;
    const int label = p[0];
    if (label > 9) throw FormatError("CIFAR label out of range");
    ImageTensor img(3, kSide, kSide);
    // channel-planar R,G,B in the record -> interleaved tensor
    for (int ch = 0; ch < 3; ++ch) {
      const unsigned char* plane = p + 1 + ch * kSide * kSide;
      for (int y = 0; y < kSide; ++y) {
        for (int x = 0; x < kSide; ++x) {
          img.at(ch, x, y) = plane[y * kSide + x] / 255.0;
        }
      }
    }
    ds.images.push_back(std::move(img));
    ds.labels.push_back(label);
  }
  return ds;
}

Dataset load_ppm_dir(const std::string& path) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(path))
    throw FormatError("not a directory: " + path);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.path().extension() == ".ppm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  Dataset ds;
  for (const auto& f : files) {
    const std::string name = f.filename().string();
    int label = 0;
    try {
      label = std::stoi(name.substr(0, name.find('_')));
    } catch (const std::exception&) {
      throw FormatError("PPM filename must start with '<label>_': " + name);
    }
    if (label < 0 || label > 9)
      throw FormatError("PPM filename label out of range: " + name);
    ds.images.push_back(load_ppm(f.string()));
    ds.labels.push_back(label);
  }
  return ds;
}

}  // namespace bwt
