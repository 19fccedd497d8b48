#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "bwt/fpe.hpp"
#include "bwt/image.hpp"
#include "bwt/key.hpp"

namespace bwt {

/// Hook placed between an attack and the model: attacks optimize
/// L(f(preprocess(x)), y), so gradients must flow back through it.
class Preprocess {
 public:
  virtual ~Preprocess() = default;
  virtual ImageTensor apply(const ImageTensor& x) const = 0;
  /// Map a gradient w.r.t. the transformed image back to the input image.
  virtual std::vector<double> input_grad(
      const std::vector<double>& upstream) const = 0;
};

class IdentityPreprocess final : public Preprocess {
 public:
  ImageTensor apply(const ImageTensor& x) const override { return x; }
  std::vector<double> input_grad(
      const std::vector<double>& upstream) const override {
    return upstream;
  }
};

/// Keyed defensive transform with analytic backward pass:
///  - shuffle: exact gradient through the pixel permutation
///  - flip:    exact gradient (-1 at flipped positions, +1 elsewhere)
///  - ffx:     straight-through scale 1 at encrypted positions,
///             255/divisor elsewhere (the map is piecewise constant)
/// Constructible from a key (pattern derived from the seed) or from an
/// explicit pattern, as produced by key-estimation attacks.
class KeyedPreprocess final : public Preprocess {
 public:
  KeyedPreprocess(const DefenseKey& key, int channels, int width, int height);
  KeyedPreprocess(TransformKind kind, int block_size,
                  std::vector<std::uint32_t> permutation,
                  std::vector<std::uint8_t> mask, const std::string& password,
                  int channels, int width, int height);

  ImageTensor apply(const ImageTensor& x) const override;
  std::vector<double> input_grad(
      const std::vector<double>& upstream) const override;

  TransformKind kind() const { return kind_; }
  const FpeLookup* table() const { return table_ ? table_.get() : nullptr; }

 private:
  void build_index_maps(int channels, int width, int height);

  TransformKind kind_;
  int block_size_ = 0;
  std::vector<std::uint32_t> permutation_;
  std::vector<std::uint8_t> mask_;
  std::shared_ptr<FpeLookup> table_;        // ffx only
  std::vector<std::size_t> forward_index_;  // shuffle: in flat -> out flat
  std::vector<double> grad_scale_;          // flip/ffx: per flat index
};

}  // namespace bwt
