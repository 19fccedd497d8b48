#include "bwt/experiment.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "bwt/attacks.hpp"
#include "bwt/dataset.hpp"
#include "bwt/errors.hpp"
#include "bwt/transforms.hpp"

namespace bwt {

double parse_epsilon(const std::string& text) {
  try {
    const std::size_t slash = text.find('/');
    if (slash != std::string::npos) {
      const double num = std::stod(text.substr(0, slash));
      const double den = std::stod(text.substr(slash + 1));
      if (den == 0.0) throw FormatError("epsilon denominator is zero");
      return num / den;
    }
    return std::stod(text);
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception&) {
    throw FormatError("bad epsilon value: " + text);
  }
}

namespace {

std::vector<double> parse_epsilon_list(const std::string& text) {
  std::vector<double> eps;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) eps.push_back(parse_epsilon(item));
  if (eps.empty()) throw FormatError("empty epsilon list");
  return eps;
}

[[noreturn]] void config_error(int lineno, const std::string& msg) {
  throw FormatError("config line " + std::to_string(lineno) + ": " + msg);
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool in_cell = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line == "[cell]") {
      cfg.cells.emplace_back();
      in_cell = true;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) config_error(lineno, "expected key=value");
    const std::string k = line.substr(0, eq);
    const std::string v = line.substr(eq + 1);
    try {
      if (!in_cell) {
        if (k == "seed") cfg.seed = std::stoull(v);
        else if (k == "train") cfg.n_train = std::stoi(v);
        else if (k == "test") cfg.n_test = std::stoi(v);
        else if (k == "width") cfg.width = std::stoi(v);
        else if (k == "height") cfg.height = std::stoi(v);
        else if (k == "epochs") cfg.epochs = std::stoi(v);
        else if (k == "lr") cfg.lr = std::stod(v);
        else if (k == "samples") cfg.attack_samples = std::stoi(v);
        else config_error(lineno, "unknown global field '" + k + "'");
      } else {
        ExperimentCell& cell = cfg.cells.back();
        if (k == "kind") {
          if (v != "none") kind_from_name(v);  // validate
          cell.kind = v;
        } else if (k == "block") {
          cell.block = std::stoi(v);
        } else if (k == "password") {
          cell.password = v;
        } else if (k == "attack") {
          if (v != "none" && v != "pgd" && v != "spsa")
            config_error(lineno, "unknown attack '" + v + "'");
          cell.attack = v;
        } else if (k == "epsilon") {
          cell.epsilons = parse_epsilon_list(v);
        } else if (k == "attacker") {
          if (v == "correct") cell.attacker_has_key = true;
          else if (v == "random") cell.attacker_has_key = false;
          else config_error(lineno, "attacker must be correct|random");
        } else {
          config_error(lineno, "unknown cell field '" + k + "'");
        }
      }
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception&) {
      config_error(lineno, "bad value for field '" + k + "'");
    }
  }
  if (cfg.n_train < 1 || cfg.n_test < 1)
    throw FormatError("config: train and test sizes must be positive");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

namespace {

struct TrainedModel {
  Classifier model;
  DefenseKey key;
  bool protected_ = false;
  std::shared_ptr<FpeLookup> table;
};

Dataset transform_dataset(const Dataset& src, const DefenseKey& key,
                          const FpeLookup* table) {
  Dataset out;
  out.labels = src.labels;
  out.images.reserve(src.images.size());
  for (const auto& img : src.images) {
    out.images.push_back(transform(img, key, table));
  }
  return out;
}

}  // namespace

std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg,
                                      bool measure_time) {
  auto [train_set, test_set] =
      synth_dataset(cfg.seed, cfg.n_train, cfg.n_test, cfg.width, cfg.height);
  const int d = cfg.width * cfg.height * 3;

  std::map<std::string, TrainedModel> models;  // keyed by kind/block/password
  auto get_model = [&](const ExperimentCell& cell) -> TrainedModel& {
    const std::string id =
        cell.kind + "/" + std::to_string(cell.block) + "/" + cell.password;
    auto it = models.find(id);
    if (it != models.end()) return it->second;

    TrainedModel tm;
    Classifier::TrainConfig recipe;
    recipe.epochs = cfg.epochs;
    recipe.lr = cfg.lr;
    recipe.seed = cfg.seed ^ 0x5bd1e995u;
    tm.model = Classifier(d, cfg.seed ^ 0x27d4eb2fu);
    if (cell.kind == "none") {
      tm.model.train(train_set.images, train_set.labels, recipe);
    } else {
      tm.protected_ = true;
      tm.key.kind = kind_from_name(cell.kind);
      tm.key.seed = cfg.seed * 0x9E3779B97F4A7C15ULL + 1;
      tm.key.block_size = cell.block;
      if (tm.key.kind == TransformKind::Ffx) {
        tm.key.password = cell.password;
        tm.table = std::make_shared<FpeLookup>(build_lookup(cell.password));
      }
      const Dataset t = transform_dataset(train_set, tm.key, tm.table.get());
      tm.model.train(t.images, t.labels, recipe);
    }
    return models.emplace(id, std::move(tm)).first->second;
  };

  std::vector<ReportRow> rows;
  for (std::size_t ci = 0; ci < cfg.cells.size(); ++ci) {
    const ExperimentCell& cell = cfg.cells[ci];
    TrainedModel& tm = get_model(cell);
    const DefenseKey* victim_key = tm.protected_ ? &tm.key : nullptr;
    const double clean_acc =
        accuracy(tm.model, test_set, victim_key, tm.table.get());

    auto classify = [&](const ImageTensor& x) {
      return tm.protected_
                 ? tm.model.predict(transform(x, tm.key, tm.table.get()))
                 : tm.model.predict(x);
    };

    for (double eps : cell.epsilons) {
      const auto t0 = std::chrono::steady_clock::now();
      ReportRow row;
      row.defense = tm.protected_ ? "protected" : "standard";
      row.kind = cell.kind;
      row.block = tm.protected_ ? cell.block : 0;
      row.attack = cell.attack;
      row.epsilon = eps;
      row.clean_acc = clean_acc;

      if (cell.attack != "none") {
        std::unique_ptr<Preprocess> hook;
        if (!tm.protected_) {
          hook = std::make_unique<IdentityPreprocess>();
        } else {
          DefenseKey attacker_key = tm.key;
          if (!cell.attacker_has_key) {
            attacker_key.seed = tm.key.seed ^ 0xA5A5A5A5DEADBEEFULL;
          }
          hook = std::make_unique<KeyedPreprocess>(attacker_key, 3, cfg.width,
                                                   cfg.height);
        }
        const std::size_t n =
            std::min<std::size_t>(cfg.attack_samples, test_set.size());
        std::vector<bool> clean_ok(n), adv_ok(n);
        for (std::size_t i = 0; i < n; ++i) {
          const ImageTensor& x = test_set.images[i];
          const int y = test_set.labels[i];
          clean_ok[i] = classify(x) == y;
          AttackConfig acfg;
          acfg.eps = eps;
          acfg.alpha = std::min(acfg.alpha, eps);
          acfg.seed = (cfg.seed ^ ci) * 0x100000001B3ULL + i;
          const ImageTensor adv = cell.attack == "pgd"
                                      ? pgd(tm.model, *hook, x, y, acfg)
                                      : spsa(tm.model, *hook, x, y, acfg);
          adv_ok[i] = classify(adv) == y;
        }
        const AsrResult asr = asr_from_outcomes(clean_ok, adv_ok);
        row.asr_eq12 = asr.asr_eq12;
        row.asr_prefiltered = asr.asr_prefiltered;
      }

      if (measure_time) {
        row.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string render_report_csv(const std::vector<ReportRow>& rows) {
  std::string out = report_csv_header();
  for (const auto& row : rows) out += report_csv_row(row);
  return out;
}

}  // namespace bwt
