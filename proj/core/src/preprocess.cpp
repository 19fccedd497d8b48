#include "bwt/preprocess.hpp"

#include "bwt/rng.hpp"
#include "bwt/transforms.hpp"

namespace bwt {

KeyedPreprocess::KeyedPreprocess(const DefenseKey& key, int channels, int width,
                                 int height)
    : kind_(key.kind), block_size_(key.block_size) {
  const int pb = block_size_ * block_size_ * channels;
  if (kind_ == TransformKind::Shuffle) {
    permutation_ = gen_permutation(key.seed, pb);
  } else {
    mask_ = gen_binary_mask(key.seed, pb);
    if (kind_ == TransformKind::Ffx) {
      table_ = std::make_shared<FpeLookup>(build_lookup(key.password));
    }
  }
  build_index_maps(channels, width, height);
}

KeyedPreprocess::KeyedPreprocess(TransformKind kind, int block_size,
                                 std::vector<std::uint32_t> permutation,
                                 std::vector<std::uint8_t> mask,
                                 const std::string& password, int channels,
                                 int width, int height)
    : kind_(kind),
      block_size_(block_size),
      permutation_(std::move(permutation)),
      mask_(std::move(mask)) {
  if (kind_ == TransformKind::Ffx) {
    table_ = std::make_shared<FpeLookup>(build_lookup(password));
  }
  build_index_maps(channels, width, height);
}

void KeyedPreprocess::build_index_maps(int channels, int width, int height) {
  const int M = block_size_;
  const std::size_t n = static_cast<std::size_t>(channels) * width * height;
  const ImageTensor ref(channels, width, height);

  // k = (row*M + col)*c + ch for each flat pixel index
  auto block_pos = [&](int ch, int x, int y) {
    return ((y % M) * M + (x % M)) * channels + ch;
  };

  if (kind_ == TransformKind::Shuffle) {
    forward_index_.resize(n);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        for (int ch = 0; ch < channels; ++ch) {
          const int vk = static_cast<int>(permutation_[block_pos(ch, x, y)]);
          // destination pixel inside the same block
          const int drow = vk / (M * channels);
          const int dcol = (vk / channels) % M;
          const int dch = vk % channels;
          const int dx = (x / M) * M + dcol;
          const int dy = (y / M) * M + drow;
          forward_index_[ref.index(ch, x, y)] = ref.index(dch, dx, dy);
        }
      }
    }
    return;
  }

  double plain_scale = 1.0;
  double coded_scale = -1.0;  // flip: d((255-i)/255)/dx = -1
  if (kind_ == TransformKind::Ffx) {
    plain_scale = 255.0 / table_->divisor;
    coded_scale = 1.0;  // straight-through
  }
  grad_scale_.resize(n);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int ch = 0; ch < channels; ++ch) {
        grad_scale_[ref.index(ch, x, y)] =
            mask_[block_pos(ch, x, y)] ? coded_scale : plain_scale;
      }
    }
  }
}

ImageTensor KeyedPreprocess::apply(const ImageTensor& x) const {
  switch (kind_) {
    case TransformKind::Shuffle:
      return transform_with_permutation(x, block_size_, permutation_);
    case TransformKind::Flip:
      return transform_with_mask(x, block_size_, mask_, nullptr);
    case TransformKind::Ffx:
      return transform_with_mask(x, block_size_, mask_, table_.get());
  }
  return x;
}

std::vector<double> KeyedPreprocess::input_grad(
    const std::vector<double>& upstream) const {
  std::vector<double> g(upstream.size());
  if (kind_ == TransformKind::Shuffle) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = upstream[forward_index_[i]];
    }
  } else {
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = upstream[i] * grad_scale_[i];
    }
  }
  return g;
}

}  // namespace bwt
