#include <benchmark/benchmark.h>

#include "bwt/classifier.hpp"
#include "bwt/fpe.hpp"
#include "bwt/rng.hpp"
#include "bwt/transforms.hpp"

namespace {

bwt::ImageTensor sample_image(int side) {
  bwt::ImageTensor img(3, side, side);
  bwt::Rng rng(1);
  for (auto& v : img.data) v = static_cast<double>(rng.bounded(256)) / 255.0;
  return img;
}

bwt::DefenseKey make_key(bwt::TransformKind kind, int block) {
  bwt::DefenseKey key;
  key.kind = kind;
  key.seed = 7;
  key.block_size = block;
  if (kind == bwt::TransformKind::Ffx) key.password = "bench";
  return key;
}

void BM_TransformShuffle(benchmark::State& state) {
  const auto img = sample_image(32);
  const auto key = make_key(bwt::TransformKind::Shuffle,
                            static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bwt::transform(img, key));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(img.size()));
}
BENCHMARK(BM_TransformShuffle)->Arg(2)->Arg(4)->Arg(8);

void BM_TransformFlip(benchmark::State& state) {
  const auto img = sample_image(32);
  const auto key =
      make_key(bwt::TransformKind::Flip, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bwt::transform(img, key));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(img.size()));
}
BENCHMARK(BM_TransformFlip)->Arg(2)->Arg(4)->Arg(8);

void BM_TransformFfx(benchmark::State& state) {
  const auto img = sample_image(32);
  const auto key =
      make_key(bwt::TransformKind::Ffx, static_cast<int>(state.range(0)));
  const bwt::FpeLookup table = bwt::build_lookup(key.password);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bwt::transform(img, key, &table));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(img.size()));
}
BENCHMARK(BM_TransformFfx)->Arg(2)->Arg(4)->Arg(8);

void BM_BuildLookup(benchmark::State& state) {
  int i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bwt::build_lookup("bench-" + std::to_string(i++)));
  }
}
BENCHMARK(BM_BuildLookup);

void BM_ClassifierForward(benchmark::State& state) {
  const auto img = sample_image(32);
  const bwt::Classifier model(static_cast<int>(img.size()), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward(img.data));
  }
}
BENCHMARK(BM_ClassifierForward);

void BM_ClassifierBackward(benchmark::State& state) {
  const auto img = sample_image(32);
  const bwt::Classifier model(static_cast<int>(img.size()), 3);
  std::vector<double> gx;
  bwt::Classifier::Gradients gt;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.loss_and_grads(img.data, 4, &gx, &gt));
  }
}
BENCHMARK(BM_ClassifierBackward);

}  // namespace

BENCHMARK_MAIN();
