#include "bwt/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "bwt/errors.hpp"
#include "bwt/rng.hpp"
#include "bwt/transforms.hpp"

namespace bwt {

namespace {

double sign_or_zero(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void project(std::vector<double>& x, const std::vector<double>& x0,
             double eps) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::clamp(x[i], x0[i] - eps, x0[i] + eps);
    x[i] = std::clamp(x[i], 0.0, 1.0);
  }
}

}  // namespace

ImageTensor pgd(const Classifier& model, const Preprocess& preprocess,
                const ImageTensor& x, int y, const AttackConfig& cfg) {
  ImageTensor adv = x;
  if (cfg.random_init && cfg.eps > 0.0) {
    Rng rng(cfg.seed);
    for (auto& v : adv.data) {
      v += (rng.uniform01() * 2.0 - 1.0) * cfg.eps;
    }
    project(adv.data, x.data, cfg.eps);
  }
  if (cfg.eps <= 0.0) return adv;

  std::vector<double> grad_t;
  for (int it = 0; it < cfg.iterations; ++it) {
    const ImageTensor xt = preprocess.apply(adv);
    model.loss_and_grads(xt.data, y, &grad_t, nullptr);
    const std::vector<double> grad = preprocess.input_grad(grad_t);
    for (std::size_t i = 0; i < adv.data.size(); ++i) {
      adv.data[i] += cfg.alpha * sign_or_zero(grad[i]);
    }
    project(adv.data, x.data, cfg.eps);
  }
  return adv;
}

std::vector<double> spsa_gradient(
    const std::function<double(const std::vector<double>&)>& loss,
    const std::vector<double>& x, double delta, int batch, Rng& rng) {
  std::vector<double> g(x.size(), 0.0);
  std::vector<double> xp(x.size()), xm(x.size());
  std::vector<double> rademacher(x.size());
  for (int b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      rademacher[i] = (rng.next() & 1) ? 1.0 : -1.0;
      xp[i] = x[i] + delta * rademacher[i];
      xm[i] = x[i] - delta * rademacher[i];
    }
    const double diff = (loss(xp) - loss(xm)) / (2.0 * delta);
    for (std::size_t i = 0; i < x.size(); ++i) g[i] += diff * rademacher[i];
  }
  for (auto& v : g) v /= batch;
  return g;
}

ImageTensor spsa(const Classifier& model, const Preprocess& preprocess,
                 const ImageTensor& x, int y, const AttackConfig& cfg) {
  ImageTensor adv = x;
  if (cfg.eps <= 0.0) return adv;
  Rng rng(cfg.seed);
  const auto loss = [&](const std::vector<double>& probe) {
    ImageTensor img = x;
    img.data = probe;
    // finite-difference probes can step outside the pixel domain; clamp so
    // the preprocessing hook always sees a valid image
    for (auto& v : img.data) v = std::clamp(v, 0.0, 1.0);
    return model.loss(preprocess.apply(img).data, y);
  };
  for (int it = 0; it < cfg.spsa_iterations; ++it) {
    const auto g =
        spsa_gradient(loss, adv.data, cfg.spsa_delta, cfg.spsa_batch, rng);
    for (std::size_t i = 0; i < adv.data.size(); ++i) {
      adv.data[i] += cfg.spsa_lr * sign_or_zero(g[i]);
    }
    project(adv.data, x.data, cfg.eps);
  }
  return adv;
}

KeySearchResult random_key_search(const Classifier& model, TransformKind kind,
                                  int block_size, const std::string& password,
                                  const Dataset& probes,
                                  const RandomKeySearchConfig& cfg) {
  if (probes.size() == 0) throw Error("random_key_search: no probe images");
  Rng rng(cfg.seed);
  FpeLookup table;
  const FpeLookup* table_ptr = nullptr;
  if (kind == TransformKind::Ffx) {
    table = build_lookup(password);
    table_ptr = &table;
  }

  auto make_key = [&](std::uint64_t seed) {
    DefenseKey key;
    key.kind = kind;
    key.seed = seed;
    key.block_size = block_size;
    if (kind == TransformKind::Ffx) key.password = password;
    return key;
  };

  KeySearchResult best;
  best.key = make_key(0);
  best.score = -1.0;
  std::uint64_t used = 0;

  if (!cfg.batch_mode) {
    // one probe image per candidate key
    while (used < cfg.budget) {
      const DefenseKey cand = make_key(rng.next());
      const ImageTensor& probe =
          probes.images[used % probes.size()];
      const int label = probes.labels[used % probes.size()];
      ++used;
      const bool correct =
          model.predict(transform(probe, cand, table_ptr)) == label;
      if (correct || best.score < 0.0) {
        best.key = cand;
        best.score = correct ? 1.0 : 0.0;
      }
      if (correct) {
        best.converged = true;
        break;
      }
    }
    best.queries_used = used;
    return best;
  }

  const std::size_t batch = std::min<std::size_t>(cfg.batch_size, probes.size());
  while (used + batch <= cfg.budget) {
    const DefenseKey cand = make_key(rng.next());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < batch; ++i) {
      if (model.predict(transform(probes.images[i], cand, table_ptr)) ==
          probes.labels[i]) {
        ++correct;
      }
    }
    used += batch;
    const double acc = static_cast<double>(correct) / batch;
    if (acc > best.score) {
      best.key = cand;
      best.score = acc;
    }
  }
  best.queries_used = used;
  best.converged = best.score >= 0.0 && used > 0;
  return best;
}

HeuristicSearchResult heuristic_pattern_search(
    TransformKind kind, int pattern_length,
    const std::function<double(const std::vector<std::uint32_t>&,
                               const std::vector<std::uint8_t>&)>& score,
    const HeuristicSearchConfig& cfg) {
  HeuristicSearchResult result;
  Rng rng(cfg.seed);
  if (kind == TransformKind::Shuffle) {
    result.permutation = gen_permutation(rng.next(), pattern_length);
  } else {
    result.mask = gen_binary_mask(rng.next(), pattern_length);
  }
  double current = score(result.permutation, result.mask);
  result.trace.push_back(current);

  for (int t = 0; t < cfg.rounds; ++t) {
    for (int i = 0; i < pattern_length; ++i) {
      for (int j = i + 1; j < pattern_length; ++j) {
        if (kind != TransformKind::Shuffle &&
            result.mask[i] == result.mask[j]) {
          continue;  // swap would be a no-op
        }
        if (kind == TransformKind::Shuffle) {
          std::swap(result.permutation[i], result.permutation[j]);
        } else {
          std::swap(result.mask[i], result.mask[j]);
        }
        const double trial = score(result.permutation, result.mask);
        if (trial > current) {
          current = trial;
          result.trace.push_back(current);
        } else {
          if (kind == TransformKind::Shuffle) {
            std::swap(result.permutation[i], result.permutation[j]);
          } else {
            std::swap(result.mask[i], result.mask[j]);
          }
        }
      }
    }
  }
  result.final_score = current;
  return result;
}

HeuristicSearchResult heuristic_key_search(const Classifier& model,
                                           const Dataset& batch,
                                           TransformKind kind, int block_size,
                                           const std::string& password,
                                           const HeuristicSearchConfig& cfg) {
  if (batch.size() == 0) throw Error("heuristic_key_search: empty batch");
  FpeLookup table;
  const FpeLookup* table_ptr = nullptr;
  if (kind == TransformKind::Ffx) {
    table = build_lookup(password);
    table_ptr = &table;
  }
  const int pb = block_size * block_size * batch.images[0].channels;
  auto score = [&](const std::vector<std::uint32_t>& v,
                   const std::vector<std::uint8_t>& r) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const ImageTensor xt =
          kind == TransformKind::Shuffle
              ? transform_with_permutation(batch.images[i], block_size, v)
              : transform_with_mask(batch.images[i], block_size, r, table_ptr);
      if (model.predict(xt) == batch.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / batch.size();
  };
  return heuristic_pattern_search(kind, pb, score, cfg);
}

AdaptiveExample inverse_transformation_attack(const Classifier& model,
                                              const DefenseKey& assumed_key,
                                              const ImageTensor& x, int y,
                                              const AttackConfig& cfg) {
  FpeLookup table;
  const FpeLookup* table_ptr = nullptr;
  if (assumed_key.kind == TransformKind::Ffx) {
    table = build_lookup(assumed_key.password);
    table_ptr = &table;
  }
  const ImageTensor xt = transform(x, assumed_key, table_ptr);
  const IdentityPreprocess identity;
  const ImageTensor xt_adv = pgd(model, identity, xt, y, cfg);

  AdaptiveExample out;
  if (cfg.eps <= 0.0) {
    out.image = inverse_transform(xt_adv, assumed_key, table_ptr);
  } else {
    InverseResult inv =
        inverse_transform_tolerant(xt_adv, assumed_key, table_ptr);
    out.image = std::move(inv.image);
    out.valid = inv.exact;
    out.invalid_positions = inv.invalid_positions;
  }
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    out.linf_distortion =
        std::max(out.linf_distortion, std::abs(out.image.data[i] - x.data[i]));
  }
  return out;
}

std::vector<double> eot_gradient(
    const Classifier& model,
    const std::vector<std::unique_ptr<KeyedPreprocess>>& hooks,
    const ImageTensor& x, int y) {
  std::vector<double> total(x.data.size(), 0.0);
  std::vector<double> grad_t;
  for (const auto& hook : hooks) {
    const ImageTensor xt = hook->apply(x);
    model.loss_and_grads(xt.data, y, &grad_t, nullptr);
    const std::vector<double> g = hook->input_grad(grad_t);
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += g[i];
  }
  return total;
}

ImageTensor eot_pgd(const Classifier& model, const std::vector<DefenseKey>& keys,
                    const ImageTensor& x, int y, const AttackConfig& cfg) {
  if (keys.empty()) throw Error("eot_pgd: no keys");
  std::vector<std::unique_ptr<KeyedPreprocess>> hooks;
  hooks.reserve(keys.size());
  for (const auto& key : keys) {
    hooks.push_back(std::make_unique<KeyedPreprocess>(key, x.channels, x.width,
                                                      x.height));
  }
  ImageTensor adv = x;
  if (cfg.eps <= 0.0) return adv;
  if (cfg.random_init) {
    Rng rng(cfg.seed);
    for (auto& v : adv.data) v += (rng.uniform01() * 2.0 - 1.0) * cfg.eps;
    project(adv.data, x.data, cfg.eps);
  }
  for (int it = 0; it < cfg.iterations; ++it) {
    const auto g = eot_gradient(model, hooks, adv, y);
    for (std::size_t i = 0; i < adv.data.size(); ++i) {
      adv.data[i] += cfg.alpha * sign_or_zero(g[i]);
    }
    project(adv.data, x.data, cfg.eps);
  }
  return adv;
}

TransferResult transferability_attack(const Dataset& train_data,
                                      const Dataset& eval_data,
                                      const DefenseKey& attacker_key,
                                      const Classifier& victim,
                                      const DefenseKey& victim_key,
                                      const Classifier::TrainConfig& recipe,
                                      const AttackConfig& cfg) {
  if (train_data.size() == 0 || eval_data.size() == 0)
    throw Error("transferability_attack: empty dataset");
  const ImageTensor& sample = train_data.images[0];
  const KeyedPreprocess attacker_hook(attacker_key, sample.channels,
                                      sample.width, sample.height);
  const KeyedPreprocess victim_hook(victim_key, sample.channels, sample.width,
                                    sample.height);

  // substitute trained on data transformed with the attacker's key
  std::vector<ImageTensor> sub_train(train_data.images.size());
  for (std::size_t i = 0; i < train_data.images.size(); ++i) {
    sub_train[i] = attacker_hook.apply(train_data.images[i]);
  }
  Classifier substitute(static_cast<int>(sample.size()), recipe.seed);
  substitute.train(sub_train, train_data.labels, recipe);

  std::size_t clean_correct = 0;
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < eval_data.size(); ++i) {
    const ImageTensor& x = eval_data.images[i];
    const int y = eval_data.labels[i];
    const bool clean_ok = victim.predict(victim_hook.apply(x)) == y;
    AttackConfig per = cfg;
    per.seed = cfg.seed + i;
    const ImageTensor adv = pgd(substitute, attacker_hook, x, y, per);
    const bool adv_ok = victim.predict(victim_hook.apply(adv)) == y;
    if (clean_ok) {
      ++clean_correct;
      if (!adv_ok) ++flipped;
    }
  }
  TransferResult out;
  out.victim_clean_acc =
      static_cast<double>(clean_correct) / eval_data.size();
  out.asr_eq12 = static_cast<double>(flipped) / eval_data.size();
  out.asr_prefiltered =
      clean_correct == 0 ? 0.0
                         : static_cast<double>(flipped) / clean_correct;
  return out;
}

}  // namespace bwt
