#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bwt/key.hpp"
#include "bwt/metrics.hpp"

namespace bwt {

/// One (defense, attack) cell of the report grid.
struct ExperimentCell {
  std::string kind = "none";  // none | shuffle | flip | ffx
  int block = 4;
  std::string password = "default-password";
  std::string attack = "none";  // none | pgd | spsa
  std::vector<double> epsilons = {8.0 / 255.0};
  bool attacker_has_key = false;  // attack through the true key vs a wrong one
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int n_train = 2000;
  int n_test = 500;
  int width = 32;
  int height = 32;
  int epochs = 30;
  double lr = 0.05;
  int attack_samples = 100;  // test images attacked per cell
  std::vector<ExperimentCell> cells;
};

/// "key=value" lines; a line reading "[cell]" opens a new cell section.
/// Errors name the offending line and field.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Parses "8/255" or a plain float.
double parse_epsilon(const std::string& text);

/// Trains one model per distinct defense, runs the configured attacks and
/// returns one row per (cell, epsilon). Fully deterministic given the config.
std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg,
                                      bool measure_time = false);

std::string render_report_csv(const std::vector<ReportRow>& rows);

}  // namespace bwt
