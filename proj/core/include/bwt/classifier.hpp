#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bwt/image.hpp"

namespace bwt {

/// Fixed two-layer network: input -> 256 ReLU -> 10 softmax.
/// All arithmetic in double; training and inference are seed-deterministic.
class Classifier {
 public:
  static constexpr int kHidden = 256;
  static constexpr int kClasses = 10;

  Classifier() = default;
  Classifier(int input_dim, std::uint64_t init_seed);

  int input_dim() const { return input_dim_; }
  std::uint64_t init_seed() const { return init_seed_; }

  std::vector<double> forward(const std::vector<double>& x) const;
  std::vector<double> forward(const ImageTensor& x) const {
    return forward(x.data);
  }

  /// Cross-entropy of the true class; cheap black-box query path.
  double loss(const std::vector<double>& x, int y) const;

  /// argmax of the logits, ties to the lowest class index.
  int predict(const std::vector<double>& x) const;
  int predict(const ImageTensor& x) const { return predict(x.data); }

  struct Gradients {
    std::vector<double> w1, b1, w2, b2;
  };

  /// Loss plus exact backprop gradients w.r.t. the input and parameters.
  double loss_and_grads(const std::vector<double>& x, int y,
                        std::vector<double>* grad_x,
                        Gradients* grad_theta) const;

  struct TrainConfig {
    int epochs = 30;
    double lr = 0.05;
    int batch_size = 64;
    std::uint64_t seed = 0;
  };

  /// Plain minibatch SGD; returns the per-epoch training accuracy trace
  /// (accuracy of pre-update predictions within each epoch).
  std::vector<double> train(const std::vector<ImageTensor>& images,
                            const std::vector<int>& labels,
                            const TrainConfig& cfg);

  void save(const std::string& path) const;
  static Classifier load(const std::string& path);

  // Exposed for tests and the model file format.
  std::vector<double> w1, b1, w2, b2;  // w1: kHidden x d, w2: kClasses x kHidden

 private:
  int input_dim_ = 0;
  std::uint64_t init_seed_ = 0;
};

std::vector<double> softmax(const std::vector<double>& logits);

}  // namespace bwt
