#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bwt/classifier.hpp"
#include "bwt/dataset.hpp"
#include "bwt/key.hpp"
#include "bwt/preprocess.hpp"
#include "bwt/rng.hpp"

namespace bwt {

struct AttackConfig {
  double eps = 8.0 / 255.0;    // l-inf radius, unit pixel scale
  double alpha = 2.0 / 255.0;  // PGD step size
  int iterations = 50;
  bool random_init = true;
  std::uint64_t seed = 0;

  double spsa_delta = 0.01;
  double spsa_lr = 0.01;
  int spsa_batch = 256;
  int spsa_iterations = 100;
};

/// White-box PGD maximizing cross-entropy through the preprocessing hook.
/// Output stays in [0,1] and within eps of x in l-inf.
ImageTensor pgd(const Classifier& model, const Preprocess& preprocess,
                const ImageTensor& x, int y, const AttackConfig& cfg);

/// SPSA gradient estimate of an arbitrary scalar function; exposed so the
/// estimator can be checked against analytic gradients.
std::vector<double> spsa_gradient(
    const std::function<double(const std::vector<double>&)>& loss,
    const std::vector<double>& x, double delta, int batch, Rng& rng);

/// Black-box SPSA: loss queries only, signed steps of spsa_lr, projected to
/// the eps ball each iteration.
ImageTensor spsa(const Classifier& model, const Preprocess& preprocess,
                 const ImageTensor& x, int y, const AttackConfig& cfg);

// --- Key estimation --------------------------------------------------------

struct RandomKeySearchConfig {
  std::uint64_t budget = 20000;  // model queries (one classified image each)
  bool batch_mode = false;       // score candidates by batch accuracy
  int batch_size = 128;
  std::uint64_t seed = 1;
};

struct KeySearchResult {
  DefenseKey key;
  double score = 0.0;  // accuracy of the probe(s) under the candidate key
  bool converged = false;
  std::uint64_t queries_used = 0;
};

/// Draw random seeds for keys of the given kind/M and query the model with
/// transformed probe images. Single mode stops at the first correct
/// prediction; batch mode returns the candidate with the best batch accuracy.
KeySearchResult random_key_search(const Classifier& model, TransformKind kind,
                                  int block_size, const std::string& password,
                                  const Dataset& probes,
                                  const RandomKeySearchConfig& cfg);

struct HeuristicSearchConfig {
  int rounds = 10;  // T
  std::uint64_t seed = 1;
};

struct HeuristicSearchResult {
  std::vector<std::uint32_t> permutation;  // shuffle
  std::vector<std::uint8_t> mask;          // flip / ffx
  std::vector<double> trace;               // score after each accepted swap
  double final_score = 0.0;
};

/// Algorithm-4-style pairwise swap hill climbing over an arbitrary pattern
/// score. Starts from a random pattern; for T rounds tries every i<j swap
/// and keeps it iff the score strictly improves.
HeuristicSearchResult heuristic_pattern_search(
    TransformKind kind, int pattern_length,
    const std::function<double(const std::vector<std::uint32_t>&,
                               const std::vector<std::uint8_t>&)>& score,
    const HeuristicSearchConfig& cfg);

/// The same search scored by model accuracy over a labeled batch of images
/// transformed with the candidate pattern.
HeuristicSearchResult heuristic_key_search(const Classifier& model,
                                           const Dataset& batch,
                                           TransformKind kind, int block_size,
                                           const std::string& password,
                                           const HeuristicSearchConfig& cfg);

// --- Adaptive attacks ------------------------------------------------------

struct AdaptiveExample {
  ImageTensor image;
  bool valid = true;          // false if ffx inversion hit unreachable values
  int invalid_positions = 0;
  double linf_distortion = 0.0;  // ||x_adaptive - x||_inf
};

/// Fig.-5 style attack: transform with the assumed key, PGD in transformed
/// space directly against the model, then invert with the assumed key.
AdaptiveExample inverse_transformation_attack(const Classifier& model,
                                              const DefenseKey& assumed_key,
                                              const ImageTensor& x, int y,
                                              const AttackConfig& cfg);

/// One aggregated EOT gradient: sum of per-key input gradients; exposed for
/// the recompute-and-sum check.
std::vector<double> eot_gradient(
    const Classifier& model,
    const std::vector<std::unique_ptr<KeyedPreprocess>>& hooks,
    const ImageTensor& x, int y);

/// PGD where every step follows sign(sum of gradients over the given keys).
ImageTensor eot_pgd(const Classifier& model, const std::vector<DefenseKey>& keys,
                    const ImageTensor& x, int y, const AttackConfig& cfg);

struct TransferResult {
  double asr_eq12 = 0.0;
  double asr_prefiltered = 0.0;
  double victim_clean_acc = 0.0;
};

/// Train a substitute with the attacker's key on the given data, attack it
/// with PGD, and evaluate the examples on the victim pipeline.
TransferResult transferability_attack(const Dataset& train_data,
                                      const Dataset& eval_data,
                                      const DefenseKey& attacker_key,
                                      const Classifier& victim,
                                      const DefenseKey& victim_key,
                                      const Classifier::TrainConfig& recipe,
                                      const AttackConfig& cfg);

}  // namespace bwt
