#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

#include "bwt/blocking.hpp"
#include "bwt/fpe.hpp"
#include "bwt/image.hpp"
#include "bwt/key.hpp"

namespace bwt {

using KeySpaceSize = boost::multiprecision::cpp_int;

// --- Block-level primitives ---------------------------------------------
// All three operate per block: output block (i,j) depends only on input
// block (i,j).

/// out(i,j,v[k]) = in(i,j,k).
BlockImage pixel_shuffle(const BlockImage& blocks,
                         const std::vector<std::uint32_t>& v);

/// out(i,j,k) = in(i,j,v[k]); exact inverse of pixel_shuffle.
BlockImage pixel_unshuffle(const BlockImage& blocks,
                           const std::vector<std::uint32_t>& v);

/// XOR with 255 where r[k] = 1. Self-inverse.
BlockImage bit_flip(const BlockImage& blocks,
                    const std::vector<std::uint8_t>& r);

/// table.enc where r[k] = 1; values land in 0..999.
BlockImage ffx_block_encrypt(const BlockImage& blocks,
                             const std::vector<std::uint8_t>& r,
                             const FpeLookup& table);

/// Exact inverse; throws CiphertextError if an encrypted position holds a
/// value with no preimage.
BlockImage ffx_block_decrypt(const BlockImage& blocks,
                             const std::vector<std::uint8_t>& r,
                             const FpeLookup& table);

// --- End-to-end pipeline --------------------------------------------------

/// Unit-interval rescaling divisor of a transformed image: 255 for shuffle
/// and flip, the table maximum for ffx.
int transform_divisor(const DefenseKey& key, const FpeLookup* table = nullptr);

/// segment -> keyed block transform -> integrate -> rescale to [0,1].
/// For ffx a prebuilt lookup for key.password may be passed to skip
/// rebuilding it; otherwise it is derived from the key.
ImageTensor transform(const ImageTensor& image, const DefenseKey& key,
                      const FpeLookup* table = nullptr);

/// Exact inverse on the integer lattice (ffx after re-quantization by the
/// divisor). Throws CiphertextError for unreachable ffx values.
ImageTensor inverse_transform(const ImageTensor& image_t, const DefenseKey& key,
                              const FpeLookup* table = nullptr);

struct InverseResult {
  ImageTensor image;
  bool exact = true;         // false if any ciphertext had to be snapped
  int invalid_positions = 0;
};

/// Like inverse_transform but snaps unreachable ffx values to the nearest
/// valid ciphertext instead of throwing; used by adaptive attacks where the
/// perturbed transformed image is not a true ciphertext.
InverseResult inverse_transform_tolerant(const ImageTensor& image_t,
                                         const DefenseKey& key,
                                         const FpeLookup* table = nullptr);

/// Transform with an explicit pattern instead of a key-derived one
/// (Algorithm-4-style key estimation mutates patterns directly).
ImageTensor transform_with_permutation(const ImageTensor& image, int M,
                                       const std::vector<std::uint32_t>& v);
ImageTensor transform_with_mask(const ImageTensor& image, int M,
                                const std::vector<std::uint8_t>& r,
                                const FpeLookup* table);  // null => bit flip

// --- Key-space arithmetic --------------------------------------------------

/// p_b! distinct shuffle patterns.
KeySpaceSize keyspace_shuffle(int p_b);

/// C(p_b, floor(p_b/2)) distinct flip/ffx masks.
KeySpaceSize keyspace_flip_or_ffx(int p_b);

}  // namespace bwt
