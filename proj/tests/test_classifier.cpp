#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "bwt/classifier.hpp"
#include "bwt/dataset.hpp"
#include "bwt/rng.hpp"

using bwt::Classifier;

namespace {

std::vector<double> random_input(int d, std::uint64_t seed) {
  bwt::Rng rng(seed);
  std::vector<double> x(d);
  for (auto& v : x) v = rng.uniform01();
  return x;
}

}  // namespace

TEST_CASE("zero weights: logits 0, softmax uniform, loss ln 10") {
  Classifier model(12, 1);
  std::fill(model.w1.begin(), model.w1.end(), 0.0);
  std::fill(model.w2.begin(), model.w2.end(), 0.0);
  const auto x = random_input(12, 3);
  const auto logits = model.forward(x);
  for (double l : logits) CHECK(l == 0.0);
  const auto p = bwt::softmax(logits);
  double sum = 0.0;
  for (double v : p) {
    CHECK(v == doctest::Approx(0.1).epsilon(1e-12));
    sum += v;
  }
  CHECK(std::abs(sum - 1.0) <= 1e-9);
  CHECK(model.loss(x, 4) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("forward is deterministic and matches a pencil computation") {
  // single effective path: w1[0][0]=2 (rest 0), b1[0]=-1, w2[3][0]=5, b2[3]=7
  Classifier model(4, 1);
  std::fill(model.w1.begin(), model.w1.end(), 0.0);
  std::fill(model.w2.begin(), model.w2.end(), 0.0);
  model.w1[0] = 2.0;
  model.b1[0] = -1.0;
  model.w2[3 * Classifier::kHidden + 0] = 5.0;
  model.b2[3] = 7.0;
  const std::vector<double> x = {0.75, 0.0, 0.0, 0.0};
  // hidden = relu(2*0.75 - 1) = 0.5 ; logit3 = 5*0.5 + 7 = 9.5
  const auto logits = model.forward(x);
  CHECK(logits[3] == doctest::Approx(9.5).epsilon(1e-15));
  CHECK(logits[0] == 0.0);
  CHECK(model.forward(x) == model.forward(x));
  // relu kills the path for negative preactivation
  const std::vector<double> x2 = {0.25, 0.0, 0.0, 0.0};
  CHECK(model.forward(x2)[3] == doctest::Approx(7.0).epsilon(1e-15));
}

TEST_CASE("analytic gradients match central finite differences") {
  const int d = 30;
  const double step = 1e-5;
  for (std::uint64_t ms = 0; ms < 10; ++ms) {
    Classifier model(d, ms + 100);
    auto x = random_input(d, ms * 3 + 1);
    const int y = static_cast<int>(ms % 10);
    std::vector<double> gx;
    Classifier::Gradients gt;
    model.loss_and_grads(x, y, &gx, &gt);

    bwt::Rng pick(ms);
    for (int probe = 0; probe < 20; ++probe) {
      // input coordinate
      const std::size_t i = pick.bounded(d);
      const double saved = x[i];
      x[i] = saved + step;
      const double lp = model.loss(x, y);
      x[i] = saved - step;
      const double lm = model.loss(x, y);
      x[i] = saved;
      const double fd = (lp - lm) / (2 * step);
      const double scale = std::max({std::abs(fd), std::abs(gx[i]), 1e-6});
      CHECK(std::abs(fd - gx[i]) / scale <= 1e-4);

      // parameter coordinate (w1)
      const std::size_t wi = pick.bounded(model.w1.size());
      const double ws = model.w1[wi];
      model.w1[wi] = ws + step;
      const double wp = model.loss(x, y);
      model.w1[wi] = ws - step;
      const double wm = model.loss(x, y);
      model.w1[wi] = ws;
      const double wfd = (wp - wm) / (2 * step);
      const double wscale =
          std::max({std::abs(wfd), std::abs(gt.w1[wi]), 1e-6});
      CHECK(std::abs(wfd - gt.w1[wi]) / wscale <= 1e-4);

      // parameter coordinate (w2)
      const std::size_t w2i = pick.bounded(model.w2.size());
      const double w2s = model.w2[w2i];
      model.w2[w2i] = w2s + step;
      const double w2p = model.loss(x, y);
      model.w2[w2i] = w2s - step;
      const double w2m = model.loss(x, y);
      model.w2[w2i] = w2s;
      const double w2fd = (w2p - w2m) / (2 * step);
      const double w2scale =
          std::max({std::abs(w2fd), std::abs(gt.w2[w2i]), 1e-6});
      CHECK(std::abs(w2fd - gt.w2[w2i]) / w2scale <= 1e-4);
    }
  }
}

TEST_CASE("predict: argmax with ties to the lowest index") {
  Classifier model(4, 1);
  std::fill(model.w1.begin(), model.w1.end(), 0.0);
  std::fill(model.w2.begin(), model.w2.end(), 0.0);
  CHECK(model.predict(std::vector<double>{0.1, 0.2, 0.3, 0.4}) == 0);
  model.b2[7] = 3.0;
  CHECK(model.predict(std::vector<double>{0.1, 0.2, 0.3, 0.4}) == 7);
  // scaling logits does not change the argmax
  for (auto& b : model.b2) b *= 2.0;
  CHECK(model.predict(std::vector<double>{0.1, 0.2, 0.3, 0.4}) == 7);
}

TEST_CASE("train: zero epochs is a no-op; same seed is bit-identical") {
  auto [train, test] = bwt::synth_dataset(5, 100, 10, 8, 8);
  Classifier a(8 * 8 * 3, 42);
  const auto w_before = a.w1;
  Classifier::TrainConfig cfg;
  cfg.epochs = 0;
  a.train(train.images, train.labels, cfg);
  CHECK(a.w1 == w_before);

  cfg.epochs = 2;
  cfg.seed = 9;
  Classifier b1(8 * 8 * 3, 42), b2(8 * 8 * 3, 42);
  b1.train(train.images, train.labels, cfg);
  b2.train(train.images, train.labels, cfg);
  CHECK(b1.w1 == b2.w1);
  CHECK(b1.b1 == b2.b1);
  CHECK(b1.w2 == b2.w2);
  CHECK(b1.b2 == b2.b2);
}

TEST_CASE("train separates a linearly separable 2-class toy set") {
  // class 0: bright left half; class 1: bright right half
  bwt::Rng rng(2);
  std::vector<bwt::ImageTensor> images;
  std::vector<int> labels;
  for (int i = 0; i < 200; ++i) {
    const int label = i % 2;
    bwt::ImageTensor img(3, 8, 8);
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        const bool bright = (label == 0) == (x < 4);
        for (int ch = 0; ch < 3; ++ch) {
          img.at(ch, x, y) = (bright ? 0.8 : 0.2) + 0.1 * rng.uniform01();
        }
      }
    }
    images.push_back(std::move(img));
    labels.push_back(label);
  }
  Classifier model(8 * 8 * 3, 7);
  Classifier::TrainConfig cfg;
  cfg.epochs = 20;
  const auto trace = model.train(images, labels, cfg);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (model.predict(images[i]) == labels[i]) ++correct;
  }
  CHECK(static_cast<double>(correct) / images.size() >= 0.99);
  CHECK(trace.size() == 20);
}

TEST_CASE("model file save/load round trips bit-exactly") {
  Classifier model(48, 123456789ULL);
  Classifier::TrainConfig cfg;
  cfg.epochs = 1;
  auto [train, test] = bwt::synth_dataset(1, 50, 10, 4, 4);
  model.train(train.images, train.labels, cfg);

  const std::string path = "/tmp/bwt_test_model.bwtm";
  model.save(path);
  const Classifier loaded = Classifier::load(path);
  CHECK(loaded.input_dim() == model.input_dim());
  CHECK(loaded.init_seed() == model.init_seed());
  // weights pass through f32, so compare after the same narrowing
  for (std::size_t i = 0; i < model.w1.size(); ++i) {
    CHECK(static_cast<float>(model.w1[i]) == static_cast<float>(loaded.w1[i]));
  }
  // a save of the loaded model is byte-identical
  const std::string path2 = "/tmp/bwt_test_model2.bwtm";
  loaded.save(path2);
  std::FILE* f1 = std::fopen(path.c_str(), "rb");
  std::FILE* f2 = std::fopen(path2.c_str(), "rb");
  REQUIRE(f1);
  REQUIRE(f2);
  int c1, c2;
  do {
    c1 = std::fgetc(f1);
    c2 = std::fgetc(f2);
    CHECK(c1 == c2);
  } while (c1 != EOF && c2 != EOF);
  std::fclose(f1);
  std::fclose(f2);
}

TEST_CASE("synthetic dataset: deterministic, noiseless classes identical") {
  auto [a1, b1] = bwt::synth_dataset(3, 40, 20, 8, 8);
  auto [a2, b2] = bwt::synth_dataset(3, 40, 20, 8, 8);
  for (std::size_t i = 0; i < a1.images.size(); ++i) {
    CHECK(a1.images[i].data == a2.images[i].data);
  }
  CHECK(b1.labels == b2.labels);

  auto [clean, unused] = bwt::synth_dataset(3, 40, 20, 8, 8, 0.0);
  (void)unused;
  // same-class images are identical without noise
  CHECK(clean.images[0].data == clean.images[10].data);
  CHECK(clean.images[1].data == clean.images[11].data);
  CHECK(clean.images[0].data != clean.images[1].data);
}
