#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bwt/attacks.hpp"
#include "bwt/classifier.hpp"
#include "bwt/dataset.hpp"
#include "bwt/preprocess.hpp"
#include "bwt/rng.hpp"
#include "bwt/transforms.hpp"

using namespace bwt;

namespace {

ImageTensor random_image(int c, int w, int h, std::uint64_t seed) {
  ImageTensor img(c, w, h);
  Rng rng(seed);
  for (auto& v : img.data) v = rng.uniform01();
  return img;
}

Classifier small_model(int d, std::uint64_t seed = 11) {
  return Classifier(d, seed);
}

}  // namespace

TEST_CASE("pgd with eps = 0 returns the input unchanged") {
  const auto x = random_image(3, 4, 4, 1);
  const auto model = small_model(static_cast<int>(x.size()));
  AttackConfig cfg;
  cfg.eps = 0.0;
  const auto adv = pgd(model, IdentityPreprocess(), x, 2, cfg);
  CHECK(adv.data == x.data);
}

TEST_CASE("one deterministic pgd step moves by alpha * sign(grad)") {
  const auto x = random_image(3, 4, 4, 2);
  const auto model = small_model(static_cast<int>(x.size()));
  AttackConfig cfg;
  cfg.random_init = false;
  cfg.iterations = 1;
  cfg.alpha = 1e-3;
  cfg.eps = 0.5;  // large enough that the eps clamp never binds here
  const int y = 5;

  std::vector<double> grad;
  model.loss_and_grads(x.data, y, &grad, nullptr);
  const auto adv = pgd(model, IdentityPreprocess(), x, y, cfg);
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    const double sign = grad[i] > 0 ? 1.0 : (grad[i] < 0 ? -1.0 : 0.0);
    const double expected = std::clamp(x.data[i] + cfg.alpha * sign, 0.0, 1.0);
    CHECK(adv.data[i] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("pgd output stays in the eps ball and in [0,1]") {
  const auto x = random_image(3, 8, 8, 3);
  const auto model = small_model(static_cast<int>(x.size()));
  AttackConfig cfg;
  cfg.iterations = 20;
  cfg.seed = 7;
  for (const TransformKind kind :
       {TransformKind::Shuffle, TransformKind::Flip, TransformKind::Ffx}) {
    DefenseKey key;
    key.kind = kind;
    key.seed = 99;
    key.block_size = 4;
    if (kind == TransformKind::Ffx) key.password = "pw";
    const KeyedPreprocess hook(key, 3, 8, 8);
    const auto adv = pgd(model, hook, x, 1, cfg);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
      CHECK(std::abs(adv.data[i] - x.data[i]) <= cfg.eps + 1e-12);
      CHECK(adv.data[i] >= 0.0);
      CHECK(adv.data[i] <= 1.0);
    }
  }
}

TEST_CASE("keyed preprocess gradients match finite differences") {
  const auto x = random_image(3, 4, 4, 9);
  const auto model = small_model(static_cast<int>(x.size()), 21);
  const int y = 3;
  const double step = 1e-6;
  for (const TransformKind kind : {TransformKind::Shuffle, TransformKind::Flip}) {
    DefenseKey key;
    key.kind = kind;
    key.seed = 5;
    key.block_size = 2;
    const KeyedPreprocess hook(key, 3, 4, 4);
    std::vector<double> grad_t;
    model.loss_and_grads(hook.apply(x).data, y, &grad_t, nullptr);
    const auto grad = hook.input_grad(grad_t);

    // quantization makes the true map piecewise constant, so compare against
    // the continuous surrogate: loss(hook.apply(.)) differentiated through the
    // exact linear part by perturbing in integer-scale-safe fashion is not
    // possible; instead verify the linear-map structure directly.
    // shuffle: gradient is a permutation of grad_t; flip: sign-flipped copy.
    if (kind == TransformKind::Shuffle) {
      auto sorted_in = grad;
      auto sorted_out = grad_t;
      std::sort(sorted_in.begin(), sorted_in.end());
      std::sort(sorted_out.begin(), sorted_out.end());
      for (std::size_t i = 0; i < grad.size(); ++i) {
        CHECK(sorted_in[i] == doctest::Approx(sorted_out[i]).epsilon(1e-12));
      }
      // moving mass along the permutation: bumping input pixel k must change
      // the transformed image at exactly the position whose gradient we copied
      ImageTensor bumped = x;
      bumped.data[0] += 64.0 / 255.0;
      const auto base_t = hook.apply(x);
      const auto bump_t = hook.apply(bumped);
      std::size_t moved = 0, where = 0;
      for (std::size_t i = 0; i < base_t.data.size(); ++i) {
        if (base_t.data[i] != bump_t.data[i]) {
          ++moved;
          where = i;
        }
      }
      CHECK(moved == 1);
      CHECK(grad[0] == doctest::Approx(grad_t[where]).epsilon(1e-12));
    } else {
      const auto mask_scale = [&](std::size_t i) {
        ImageTensor bumped = x;
        bumped.data[i] = std::min(1.0, bumped.data[i] + 64.0 / 255.0);
        const double delta =
            hook.apply(bumped).data[i] - hook.apply(x).data[i];
        return delta < 0 ? -1.0 : 1.0;
      };
      for (std::size_t i = 0; i < grad.size(); ++i) {
        CHECK(grad[i] == doctest::Approx(mask_scale(i) * grad_t[i])
                             .epsilon(1e-12));
      }
    }
  }
  (void)step;
}

TEST_CASE("spsa gradient estimate converges on a quadratic") {
  // f(x) = 0.5 ||x - a||^2 has gradient x - a; for quadratics each SPSA probe
  // returns the exact directional derivative, so only Rademacher averaging
  // noise remains.
  const int d = 16;
  std::vector<double> a(d), x(d);
  Rng init(4);
  for (int i = 0; i < d; ++i) {
    a[i] = init.uniform01();
    x[i] = init.uniform01();
  }
  const auto f = [&](const std::vector<double>& p) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += 0.5 * (p[i] - a[i]) * (p[i] - a[i]);
    return s;
  };
  Rng rng(8);
  const auto g = spsa_gradient(f, x, 0.01, 4096, rng);
  for (int i = 0; i < d; ++i) {
    const double truth = x[i] - a[i];
    CHECK(std::abs(g[i] - truth) <= 0.2 * std::abs(truth) + 0.05);
  }
}

TEST_CASE("spsa attack respects the eps ball and [0,1]") {
  const auto x = random_image(3, 4, 4, 12);
  const auto model = small_model(static_cast<int>(x.size()));
  AttackConfig cfg;
  cfg.spsa_iterations = 5;
  cfg.spsa_batch = 8;
  cfg.seed = 3;
  const auto adv = spsa(model, IdentityPreprocess(), x, 0, cfg);
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    CHECK(std::abs(adv.data[i] - x.data[i]) <= cfg.eps + 1e-12);
    CHECK(adv.data[i] >= 0.0);
    CHECK(adv.data[i] <= 1.0);
  }
  // sign steps: every coordinate moved by a multiple of spsa_lr before
  // projection, so unprojected coordinates sit on the step lattice
  bool any_moved = false;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    if (adv.data[i] != x.data[i]) any_moved = true;
  }
  CHECK(any_moved);
}

TEST_CASE("random key search: budget accounting and early convergence") {
  // zero-weight model always predicts class 0
  Classifier model(2 * 2 * 3, 1);
  std::fill(model.w1.begin(), model.w1.end(), 0.0);
  std::fill(model.w2.begin(), model.w2.end(), 0.0);

  Dataset probes;
  probes.images.push_back(random_image(3, 2, 2, 1));
  probes.labels.push_back(0);

  RandomKeySearchConfig cfg;
  cfg.budget = 100;
  auto res = random_key_search(model, TransformKind::Flip, 2, "", probes, cfg);
  CHECK(res.converged);
  CHECK(res.queries_used == 1);
  CHECK(res.score == 1.0);
  // first candidate seed comes from the search's own PRNG stream
  CHECK(res.key.seed == Rng(cfg.seed).next());

  probes.labels[0] = 4;  // never predicted: exhaust the budget
  cfg.budget = 37;
  res = random_key_search(model, TransformKind::Flip, 2, "", probes, cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.queries_used == 37);
  CHECK(res.score == 0.0);
}

TEST_CASE("random key search batch mode scores whole batches") {
  Classifier model(2 * 2 * 3, 1);
  std::fill(model.w1.begin(), model.w1.end(), 0.0);
  std::fill(model.w2.begin(), model.w2.end(), 0.0);
  Dataset probes;
  for (int i = 0; i < 4; ++i) {
    probes.images.push_back(random_image(3, 2, 2, 10 + i));
    probes.labels.push_back(i == 0 ? 0 : 1);  // model gets exactly 1/4 right
  }
  RandomKeySearchConfig cfg;
  cfg.batch_mode = true;
  cfg.batch_size = 4;
  cfg.budget = 12;  // room for exactly 3 candidates
  const auto res =
      random_key_search(model, TransformKind::Shuffle, 2, "", probes, cfg);
  CHECK(res.queries_used == 12);
  CHECK(res.score == doctest::Approx(0.25));
}

TEST_CASE("heuristic search recovers a planted mask") {
  const int pb = 12;
  const auto target = gen_binary_mask(77, pb);
  const auto score = [&](const std::vector<std::uint32_t>&,
                         const std::vector<std::uint8_t>& mask) {
    int match = 0;
    for (int i = 0; i < pb; ++i) match += mask[i] == target[i];
    return static_cast<double>(match) / pb;
  };
  HeuristicSearchConfig cfg;
  cfg.rounds = 10;
  cfg.seed = 5;
  const auto res = heuristic_pattern_search(TransformKind::Flip, pb, score, cfg);
  CHECK(res.final_score == 1.0);
  CHECK(res.mask == target);
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    CHECK(res.trace[i] > res.trace[i - 1]);
  }
}

TEST_CASE("heuristic search recovers a planted permutation") {
  const int pb = 8;
  const auto target = gen_permutation(123, pb);
  const auto score = [&](const std::vector<std::uint32_t>& perm,
                         const std::vector<std::uint8_t>&) {
    int match = 0;
    for (int i = 0; i < pb; ++i) match += perm[i] == target[i];
    return static_cast<double>(match) / pb;
  };
  HeuristicSearchConfig cfg;
  cfg.rounds = 10;
  cfg.seed = 6;
  const auto res =
      heuristic_pattern_search(TransformKind::Shuffle, pb, score, cfg);
  CHECK(res.final_score == 1.0);
  CHECK(res.permutation == target);
}

TEST_CASE("heuristic search with zero rounds returns the random start") {
  HeuristicSearchConfig cfg;
  cfg.rounds = 0;
  cfg.seed = 17;
  const auto score = [](const std::vector<std::uint32_t>&,
                        const std::vector<std::uint8_t>&) { return 0.5; };
  const auto res = heuristic_pattern_search(TransformKind::Flip, 12, score, cfg);
  CHECK(res.mask == gen_binary_mask(Rng(17).next(), 12));
  CHECK(res.trace.size() == 1);
  CHECK(res.final_score == 0.5);
}

TEST_CASE("inverse transformation attack with eps = 0 is an exact roundtrip") {
  const auto x = random_image(3, 4, 4, 31);
  const auto model = small_model(static_cast<int>(x.size()));
  AttackConfig cfg;
  cfg.eps = 0.0;
  for (const TransformKind kind :
       {TransformKind::Shuffle, TransformKind::Flip, TransformKind::Ffx}) {
    DefenseKey key;
    key.kind = kind;
    key.seed = 44;
    key.block_size = 4;
    if (kind == TransformKind::Ffx) key.password = "secret";
    const auto out = inverse_transformation_attack(model, key, x, 1, cfg);
    CHECK(out.valid);
    CHECK(out.invalid_positions == 0);
    // roundtrip is exact at integer resolution
    CHECK(out.linf_distortion <= 0.5 / 255.0 + 1e-12);
  }
}

TEST_CASE("inverse transformation attack output is a valid image") {
  const auto x = random_image(3, 4, 4, 32);
  const auto model = small_model(static_cast<int>(x.size()));
  AttackConfig cfg;
  cfg.iterations = 10;
  DefenseKey key;
  key.kind = TransformKind::Flip;
  key.seed = 12;
  key.block_size = 2;
  const auto out = inverse_transformation_attack(model, key, x, 1, cfg);
  CHECK(out.valid);  // every byte has a flip preimage
  for (double v : out.image.data) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(out.linf_distortion > 0.0);
}

TEST_CASE("eot gradient equals the sum of per-key gradients") {
  const auto x = random_image(3, 4, 4, 50);
  const auto model = small_model(static_cast<int>(x.size()));
  std::vector<std::unique_ptr<KeyedPreprocess>> hooks;
  std::vector<DefenseKey> keys;
  for (std::uint64_t s : {3ULL, 9ULL, 27ULL}) {
    DefenseKey key;
    key.kind = TransformKind::Shuffle;
    key.seed = s;
    key.block_size = 2;
    keys.push_back(key);
    hooks.push_back(std::make_unique<KeyedPreprocess>(key, 3, 4, 4));
  }
  const int y = 6;
  const auto total = eot_gradient(model, hooks, x, y);
  std::vector<double> manual(x.size(), 0.0);
  for (const auto& hook : hooks) {
    std::vector<double> gt;
    model.loss_and_grads(hook->apply(x).data, y, &gt, nullptr);
    const auto g = hook->input_grad(gt);
    for (std::size_t i = 0; i < manual.size(); ++i) manual[i] += g[i];
  }
  for (std::size_t i = 0; i < total.size(); ++i) {
    CHECK(total[i] == doctest::Approx(manual[i]).epsilon(1e-12));
  }
}

TEST_CASE("eot pgd over duplicated keys matches single-key pgd") {
  const auto x = random_image(3, 4, 4, 60);
  const auto model = small_model(static_cast<int>(x.size()));
  DefenseKey key;
  key.kind = TransformKind::Flip;
  key.seed = 8;
  key.block_size = 4;
  AttackConfig cfg;
  cfg.iterations = 10;
  cfg.seed = 2;
  const auto single =
      pgd(model, KeyedPreprocess(key, 3, 4, 4), x, 3, cfg);
  const auto eot = eot_pgd(model, {key, key, key}, x, 3, cfg);
  // sign(3 g) = sign(g) every step, so the trajectories coincide
  CHECK(eot.data == single.data);
}
