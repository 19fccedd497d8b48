#include "bwt/transforms.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "bwt/errors.hpp"
#include "bwt/rng.hpp"

namespace bwt {

namespace {

void check_pattern_length(const BlockImage& blocks, std::size_t len) {
  if (len != static_cast<std::size_t>(blocks.block_pixels)) {
    throw DimensionError("pattern length " + std::to_string(len) +
                         " != block pixels " +
                         std::to_string(blocks.block_pixels));
  }
}

void check_byte_range(const BlockImage& blocks) {
  for (int v : blocks.data) {
    if (v < 0 || v > 255) throw Error("pixel value outside 8-bit range");
  }
}

}  // namespace

BlockImage pixel_shuffle(const BlockImage& blocks,
                         const std::vector<std::uint32_t>& v) {
  check_pattern_length(blocks, v.size());
  BlockImage out = blocks;
  const int pb = blocks.block_pixels;
  const std::size_t nblocks = blocks.data.size() / pb;
  for (std::size_t b = 0; b < nblocks; ++b) {
    const int* src = blocks.data.data() + b * pb;
    int* dst = out.data.data() + b * pb;
    for (int k = 0; k < pb; ++k) dst[v[k]] = src[k];
  }
  return out;
}

BlockImage pixel_unshuffle(const BlockImage& blocks,
                           const std::vector<std::uint32_t>& v) {
  check_pattern_length(blocks, v.size());
  BlockImage out = blocks;
  const int pb = blocks.block_pixels;
  const std::size_t nblocks = blocks.data.size() / pb;
  for (std::size_t b = 0; b < nblocks; ++b) {
    const int* src = blocks.data.data() + b * pb;
    int* dst = out.data.data() + b * pb;
    for (int k = 0; k < pb; ++k) dst[k] = src[v[k]];
  }
  return out;
}

BlockImage bit_flip(const BlockImage& blocks,
                    const std::vector<std::uint8_t>& r) {
  check_pattern_length(blocks, r.size());
  check_byte_range(blocks);
  BlockImage out = blocks;
  const int pb = blocks.block_pixels;
  const std::size_t nblocks = blocks.data.size() / pb;
  for (std::size_t b = 0; b < nblocks; ++b) {
    int* dst = out.data.data() + b * pb;
    for (int k = 0; k < pb; ++k) {
      if (r[k]) dst[k] ^= 0xFF;
    }
  }
  return out;
}

BlockImage ffx_block_encrypt(const BlockImage& blocks,
                             const std::vector<std::uint8_t>& r,
                             const FpeLookup& table) {
  check_pattern_length(blocks, r.size());
  check_byte_range(blocks);
  BlockImage out = blocks;
  const int pb = blocks.block_pixels;
  const std::size_t nblocks = blocks.data.size() / pb;
  for (std::size_t b = 0; b < nblocks; ++b) {
    int* dst = out.data.data() + b * pb;
    for (int k = 0; k < pb; ++k) {
      if (r[k]) dst[k] = table.enc[dst[k]];
    }
  }
  return out;
}

BlockImage ffx_block_decrypt(const BlockImage& blocks,
                             const std::vector<std::uint8_t>& r,
                             const FpeLookup& table) {
  check_pattern_length(blocks, r.size());
  BlockImage out = blocks;
  const int pb = blocks.block_pixels;
  const std::size_t nblocks = blocks.data.size() / pb;
  for (std::size_t b = 0; b < nblocks; ++b) {
    int* dst = out.data.data() + b * pb;
    for (int k = 0; k < pb; ++k) {
      if (r[k]) {
        if (!table.in_image(dst[k])) {
          throw CiphertextError("value " + std::to_string(dst[k]) +
                                " has no preimage in the lookup table");
        }
        dst[k] = table.dec[dst[k]];
      }
    }
  }
  return out;
}

int transform_divisor(const DefenseKey& key, const FpeLookup* table) {
  if (key.kind != TransformKind::Ffx) return 255;
  if (table != nullptr) return table->divisor;
  return build_lookup(key.password).divisor;
}

namespace {

BlockImage apply_kind(const BlockImage& blocks, const DefenseKey& key,
                      const FpeLookup* table, FpeLookup& scratch, bool inverse) {
  const int pb = blocks.block_pixels;
  switch (key.kind) {
    case TransformKind::Shuffle: {
      const auto v = gen_permutation(key.seed, pb);
      return inverse ? pixel_unshuffle(blocks, v) : pixel_shuffle(blocks, v);
    }
    case TransformKind::Flip: {
      const auto r = gen_binary_mask(key.seed, pb);
      return bit_flip(blocks, r);  // involution
    }
    case TransformKind::Ffx: {
      const auto r = gen_binary_mask(key.seed, pb);
      if (table == nullptr) {
        scratch = build_lookup(key.password);
        table = &scratch;
      }
      return inverse ? ffx_block_decrypt(blocks, r, *table)
                     : ffx_block_encrypt(blocks, r, *table);
    }
  }
  throw Error("unreachable transform kind");
}

}  // namespace

ImageTensor transform(const ImageTensor& image, const DefenseKey& key,
                      const FpeLookup* table) {
  FpeLookup scratch;
  const BlockImage blocks = segment(quantize(image, 255), key.block_size);
  const BlockImage out = apply_kind(blocks, key, table, scratch, false);
  const int divisor =
      key.kind == TransformKind::Ffx
          ? (table != nullptr ? table->divisor : scratch.divisor)
          : 255;
  return dequantize(integrate(out), divisor);
}

ImageTensor inverse_transform(const ImageTensor& image_t, const DefenseKey& key,
                              const FpeLookup* table) {
  FpeLookup scratch;
  if (key.kind == TransformKind::Ffx && table == nullptr) {
    scratch = build_lookup(key.password);
    table = &scratch;
  }
  const int divisor = transform_divisor(key, table);
  const BlockImage blocks = segment(quantize(image_t, divisor), key.block_size);
  FpeLookup unused;
  const BlockImage out = apply_kind(blocks, key, table, unused, true);
  return dequantize(integrate(out), 255);
}

InverseResult inverse_transform_tolerant(const ImageTensor& image_t,
                                         const DefenseKey& key,
                                         const FpeLookup* table) {
  FpeLookup scratch;
  if (key.kind == TransformKind::Ffx && table == nullptr) {
    scratch = build_lookup(key.password);
    table = &scratch;
  }
  InverseResult result;
  if (key.kind != TransformKind::Ffx) {
    result.image = inverse_transform(image_t, key, table);
    return result;
  }
  const int divisor = table->divisor;
  BlockImage blocks = segment(quantize(image_t, divisor), key.block_size);
  const auto r = gen_binary_mask(key.seed, blocks.block_pixels);
  const int pb = blocks.block_pixels;
  const std::size_t nblocks = blocks.data.size() / pb;
  for (std::size_t b = 0; b < nblocks; ++b) {
    int* dst = blocks.data.data() + b * pb;
    for (int k = 0; k < pb; ++k) {
      if (!r[k]) continue;
      int m = dst[k];
      if (m < 0) m = 0;
      if (m > 999) m = 999;
      if (!table->in_image(m)) {
        ++result.invalid_positions;
        // snap to the nearest reachable ciphertext
        for (int d = 1; d < 1000; ++d) {
          if (m - d >= 0 && table->in_image(m - d)) { m -= d; break; }
          if (m + d <= 999 && table->in_image(m + d)) { m += d; break; }
        }
      }
      dst[k] = table->dec[m];
    }
  }
  result.exact = result.invalid_positions == 0;
  result.image = dequantize(integrate(blocks), 255);
  return result;
}

ImageTensor transform_with_permutation(const ImageTensor& image, int M,
                                       const std::vector<std::uint32_t>& v) {
  const BlockImage blocks = segment(quantize(image, 255), M);
  return dequantize(integrate(pixel_shuffle(blocks, v)), 255);
}

ImageTensor transform_with_mask(const ImageTensor& image, int M,
                                const std::vector<std::uint8_t>& r,
                                const FpeLookup* table) {
  const BlockImage blocks = segment(quantize(image, 255), M);
  if (table == nullptr) {
    return dequantize(integrate(bit_flip(blocks, r)), 255);
  }
  return dequantize(integrate(ffx_block_encrypt(blocks, r, *table)),
                    table->divisor);
}

KeySpaceSize keyspace_shuffle(int p_b) {
  if (p_b < 1) throw Error("keyspace_shuffle: p_b must be >= 1");
  KeySpaceSize result = 1;
  for (int i = 2; i <= p_b; ++i) result *= i;
  return result;
}

KeySpaceSize keyspace_flip_or_ffx(int p_b) {
  if (p_b < 2) throw Error("keyspace_flip_or_ffx: p_b must be >= 2");
  const int k = p_b / 2;
  KeySpaceSize result = 1;
  for (int i = 1; i <= k; ++i) {
    result *= (p_b - k + i);
    result /= i;  // exact: C(n, i) is integral at every step
  }
  return result;
}

}  // namespace bwt
