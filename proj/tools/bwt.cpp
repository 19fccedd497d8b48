// Command-line frontend for the block-wise keyed transformation defense and
// its attack evaluation harness.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "bwt/attacks.hpp"
#include "bwt/dataset.hpp"
#include "bwt/errors.hpp"
#include "bwt/experiment.hpp"
#include "bwt/io.hpp"
#include "bwt/key.hpp"
#include "bwt/metrics.hpp"
#include "bwt/transforms.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInvariant = 3;

struct DataSpec {
  // "synth:<train>,<test>,<w>,<h>,<seed>" | "cifar:<path>" | "ppmdir:<path>"
  std::string raw;
};

struct LoadedData {
  bwt::Dataset train;
  bwt::Dataset test;
};

LoadedData load_data(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos)
    throw bwt::FormatError("data spec needs a 'source:' prefix: " + spec);
  const std::string src = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  LoadedData out;
  if (src == "synth") {
    int ntr = 2000, nte = 500, w = 32, h = 32;
    unsigned long long seed = 1;
    if (std::sscanf(arg.c_str(), "%d,%d,%d,%d,%llu", &ntr, &nte, &w, &h,
                    &seed) != 5) {
      throw bwt::FormatError(
          "synth spec is synth:<train>,<test>,<w>,<h>,<seed>");
    }
    auto [train, test] = bwt::synth_dataset(seed, ntr, nte, w, h);
    out.train = std::move(train);
    out.test = std::move(test);
  } else if (src == "cifar") {
    out.train = bwt::load_cifar_bin(arg);
    out.test = out.train;
  } else if (src == "ppmdir") {
    out.train = bwt::load_ppm_dir(arg);
    out.test = out.train;
  } else {
    throw bwt::FormatError("unknown data source: " + src);
  }
  return out;
}

bwt::Dataset transform_all(const bwt::Dataset& src, const bwt::DefenseKey& key,
                           const bwt::FpeLookup* table) {
  bwt::Dataset out;
  out.labels = src.labels;
  for (const auto& img : src.images)
    out.images.push_back(bwt::transform(img, key, table));
  return out;
}

std::unique_ptr<bwt::FpeLookup> maybe_table(const bwt::DefenseKey& key) {
  if (key.kind != bwt::TransformKind::Ffx) return nullptr;
  return std::make_unique<bwt::FpeLookup>(bwt::build_lookup(key.password));
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw bwt::FormatError("cannot write: " + path);
  f << text;
}

int run(int argc, char** argv) {
  CLI::App app{"Key-based block-wise image transformation defense"};
  app.require_subcommand(1);

  // --- keygen ---
  auto* keygen = app.add_subcommand("keygen", "Write a key file");
  std::string kg_kind = "shuffle", kg_password, kg_out = "key.txt";
  std::uint64_t kg_seed = 0;
  int kg_block = 4;
  keygen->add_option("--kind", kg_kind, "shuffle|flip|ffx")->required();
  keygen->add_option("--seed", kg_seed, "64-bit seed")->required();
  keygen->add_option("--block", kg_block, "block size M")->required();
  keygen->add_option("--password", kg_password, "FFX password");
  keygen->add_option("-o,--output", kg_out, "output key file");
  keygen->callback([&] {
    bwt::DefenseKey key;
    key.kind = bwt::kind_from_name(kg_kind);
    key.seed = kg_seed;
    key.block_size = kg_block;
    key.password = kg_password;
    if (key.kind == bwt::TransformKind::Ffx && kg_password.empty())
      throw bwt::FormatError("ffx keys need --password");
    bwt::save_key_file(key, kg_out);
  });

  // --- transform ---
  auto* tf = app.add_subcommand("transform", "Transform a PPM image");
  std::string tf_key, tf_in, tf_out;
  bool tf_inverse = false;
  tf->add_option("--key", tf_key, "key file")->required();
  tf->add_option("-i,--input", tf_in, "input PPM")->required();
  tf->add_option("-o,--output", tf_out, "output PPM")->required();
  tf->add_flag("--inverse", tf_inverse, "apply the inverse transform");
  tf->callback([&] {
    const bwt::DefenseKey key = bwt::load_key_file(tf_key);
    const auto table = maybe_table(key);
    const bwt::ImageTensor in = bwt::load_ppm(tf_in);
    const bwt::ImageTensor out =
        tf_inverse ? bwt::inverse_transform(in, key, table.get())
                   : bwt::transform(in, key, table.get());
    bwt::save_ppm(out, tf_out);
  });

  // --- keyspace ---
  auto* ks = app.add_subcommand("keyspace", "Print the exact key-space size");
  std::string ks_kind = "shuffle";
  int ks_block = 4, ks_channels = 3;
  ks->add_option("--kind", ks_kind, "shuffle|flip|ffx")->required();
  ks->add_option("--block", ks_block, "block size M")->required();
  ks->add_option("--channels", ks_channels, "channel count (default 3)");
  ks->callback([&] {
    const int pb = ks_block * ks_block * ks_channels;
    const bwt::TransformKind kind = bwt::kind_from_name(ks_kind);
    const bwt::KeySpaceSize n = kind == bwt::TransformKind::Shuffle
                                    ? bwt::keyspace_shuffle(pb)
                                    : bwt::keyspace_flip_or_ffx(pb);
    std::cout << n << "\n";
  });

  // --- train ---
  auto* tr = app.add_subcommand("train", "Train the toy classifier");
  std::string tr_data, tr_key, tr_out = "model.bwtm";
  int tr_epochs = 30;
  double tr_lr = 0.05;
  std::uint64_t tr_seed = 1;
  tr->add_option("--data", tr_data, "synth:...|cifar:...|ppmdir:...")
      ->required();
  tr->add_option("--key", tr_key, "train on transformed data with this key");
  tr->add_option("--epochs", tr_epochs, "SGD epochs");
  tr->add_option("--lr", tr_lr, "learning rate");
  tr->add_option("--seed", tr_seed, "init/shuffle seed");
  tr->add_option("-o,--output", tr_out, "model file");
  tr->callback([&] {
    LoadedData data = load_data(tr_data);
    if (!tr_key.empty()) {
      const bwt::DefenseKey key = bwt::load_key_file(tr_key);
      const auto table = maybe_table(key);
      data.train = transform_all(data.train, key, table.get());
    }
    if (data.train.size() == 0) throw bwt::FormatError("empty training set");
    bwt::Classifier model(static_cast<int>(data.train.images[0].size()),
                          tr_seed);
    bwt::Classifier::TrainConfig cfg;
    cfg.epochs = tr_epochs;
    cfg.lr = tr_lr;
    cfg.seed = tr_seed;
    const auto trace = model.train(data.train.images, data.train.labels, cfg);
    if (!trace.empty())
      std::cerr << "final train accuracy: " << trace.back() << "\n";
    model.save(tr_out);
  });

  // --- evaluate ---
  auto* ev = app.add_subcommand("evaluate", "Print accuracy on a dataset");
  std::string ev_model, ev_data, ev_key;
  ev->add_option("--model", ev_model, "model file")->required();
  ev->add_option("--data", ev_data, "data spec")->required();
  ev->add_option("--key", ev_key, "provider key file");
  ev->callback([&] {
    const bwt::Classifier model = bwt::Classifier::load(ev_model);
    const LoadedData data = load_data(ev_data);
    std::unique_ptr<bwt::DefenseKey> key;
    std::unique_ptr<bwt::FpeLookup> table;
    if (!ev_key.empty()) {
      key = std::make_unique<bwt::DefenseKey>(bwt::load_key_file(ev_key));
      table = maybe_table(*key);
    }
    printf("%.6f\n", bwt::accuracy(model, data.test, key.get(), table.get()));
  });

  // --- attack ---
  auto* at = app.add_subcommand("attack", "Run one attack, emit a CSV report");
  std::string at_model, at_key, at_attack = "pgd", at_data, at_eps = "8/255";
  std::string at_out;
  int at_samples = 100, at_eot_keys = 30, at_rounds = 10, at_batch = 128;
  std::uint64_t at_budget = 20000, at_seed = 1;
  bool at_correct_key = false, at_batch_mode = false;
  at->add_option("--model", at_model, "model file")->required();
  at->add_option("--key", at_key, "victim key file (omit for standard model)");
  at->add_option("--attack", at_attack,
                 "pgd|spsa|keysearch-rand|keysearch-heur|invtrans|eot|transfer")
      ->required();
  at->add_option("--eps", at_eps, "l-inf budget, e.g. 8/255");
  at->add_option("--data", at_data, "data spec")->required();
  at->add_option("--samples", at_samples, "images to attack");
  at->add_option("--eot-keys", at_eot_keys, "keys aggregated by eot");
  at->add_option("--rounds", at_rounds, "heuristic search rounds T");
  at->add_option("--batch", at_batch, "search batch size");
  at->add_option("--budget", at_budget, "random search query budget");
  at->add_option("--seed", at_seed, "attack seed");
  at->add_flag("--correct-key", at_correct_key,
               "attacker uses the true key (white-box upper bound)");
  at->add_flag("--batch-mode", at_batch_mode, "batch-scored random search");
  at->add_option("-o,--output", at_out, "CSV output (default stdout)");
  at->callback([&] {
    const bwt::Classifier model = bwt::Classifier::load(at_model);
    const LoadedData data = load_data(at_data);
    const bwt::Dataset& test = data.test;
    if (test.size() == 0) throw bwt::FormatError("empty dataset");
    const int w = test.images[0].width, h = test.images[0].height,
              c = test.images[0].channels;

    std::unique_ptr<bwt::DefenseKey> victim_key;
    std::unique_ptr<bwt::FpeLookup> table;
    if (!at_key.empty()) {
      victim_key =
          std::make_unique<bwt::DefenseKey>(bwt::load_key_file(at_key));
      table = maybe_table(*victim_key);
    }
    auto classify = [&](const bwt::ImageTensor& x) {
      return victim_key
                 ? model.predict(bwt::transform(x, *victim_key, table.get()))
                 : model.predict(x);
    };

    bwt::AttackConfig cfg;
    cfg.eps = bwt::parse_epsilon(at_eps);
    cfg.alpha = std::min(cfg.alpha, cfg.eps);
    cfg.seed = at_seed;

    const std::size_t n = std::min<std::size_t>(at_samples, test.size());
    bwt::Dataset eval;
    eval.images.assign(test.images.begin(), test.images.begin() + n);
    eval.labels.assign(test.labels.begin(), test.labels.begin() + n);

    // resolve the attacker's preprocessing hook per attack type
    std::unique_ptr<bwt::Preprocess> hook;
    auto wrong_key = [&](std::uint64_t salt) {
      bwt::DefenseKey k = *victim_key;
      k.seed = victim_key->seed ^ salt;
      return k;
    };

    bwt::ReportRow row;
    row.defense = victim_key ? "protected" : "standard";
    row.kind = victim_key ? std::string(bwt::kind_name(victim_key->kind))
                          : "none";
    row.block = victim_key ? victim_key->block_size : 0;
    row.attack = at_attack;
    row.epsilon = cfg.eps;

    std::vector<bool> clean_ok(n), adv_ok(n);
    auto run_per_image = [&](auto&& make_adv) {
      for (std::size_t i = 0; i < n; ++i) {
        clean_ok[i] = classify(eval.images[i]) == eval.labels[i];
        bwt::AttackConfig per = cfg;
        per.seed = cfg.seed + i;
        const bwt::ImageTensor adv =
            make_adv(eval.images[i], eval.labels[i], per);
        adv_ok[i] = classify(adv) == eval.labels[i];
      }
    };

    if (at_attack == "pgd" || at_attack == "spsa") {
      if (!victim_key) {
        hook = std::make_unique<bwt::IdentityPreprocess>();
      } else {
        const bwt::DefenseKey k =
            at_correct_key ? *victim_key : wrong_key(0xA5A5A5A5DEADBEEFULL);
        hook = std::make_unique<bwt::KeyedPreprocess>(k, c, w, h);
      }
      run_per_image([&](const bwt::ImageTensor& x, int y,
                        const bwt::AttackConfig& per) {
        return at_attack == "pgd" ? bwt::pgd(model, *hook, x, y, per)
                                  : bwt::spsa(model, *hook, x, y, per);
      });
    } else if (at_attack == "keysearch-rand") {
      if (!victim_key) throw bwt::FormatError("keysearch needs --key");
      bwt::RandomKeySearchConfig scfg;
      scfg.budget = at_budget;
      scfg.batch_mode = at_batch_mode;
      scfg.batch_size = at_batch;
      scfg.seed = at_seed;
      const auto found = bwt::random_key_search(
          model, victim_key->kind, victim_key->block_size,
          victim_key->password, eval, scfg);
      std::cerr << "best candidate score " << found.score << " after "
                << found.queries_used << " queries\n";
      hook = std::make_unique<bwt::KeyedPreprocess>(found.key, c, w, h);
      run_per_image([&](const bwt::ImageTensor& x, int y,
                        const bwt::AttackConfig& per) {
        return bwt::pgd(model, *hook, x, y, per);
      });
    } else if (at_attack == "keysearch-heur") {
      if (!victim_key) throw bwt::FormatError("keysearch needs --key");
      bwt::HeuristicSearchConfig scfg;
      scfg.rounds = at_rounds;
      scfg.seed = at_seed;
      bwt::Dataset batch;
      const std::size_t bn = std::min<std::size_t>(at_batch, test.size());
      batch.images.assign(test.images.begin(), test.images.begin() + bn);
      batch.labels.assign(test.labels.begin(), test.labels.begin() + bn);
      const auto est = bwt::heuristic_key_search(
          model, batch, victim_key->kind, victim_key->block_size,
          victim_key->password, scfg);
      std::cerr << "estimated pattern batch accuracy " << est.final_score
                << "\n";
      hook = std::make_unique<bwt::KeyedPreprocess>(
          victim_key->kind, victim_key->block_size, est.permutation, est.mask,
          victim_key->password, c, w, h);
      run_per_image([&](const bwt::ImageTensor& x, int y,
                        const bwt::AttackConfig& per) {
        return bwt::pgd(model, *hook, x, y, per);
      });
    } else if (at_attack == "invtrans") {
      if (!victim_key) throw bwt::FormatError("invtrans needs --key");
      const bwt::DefenseKey assumed =
          at_correct_key ? *victim_key : wrong_key(0xA5A5A5A5DEADBEEFULL);
      std::size_t invalid = 0;
      double max_distortion = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        clean_ok[i] = classify(eval.images[i]) == eval.labels[i];
        bwt::AttackConfig per = cfg;
        per.seed = cfg.seed + i;
        const auto adv = bwt::inverse_transformation_attack(
            model, assumed, eval.images[i], eval.labels[i], per);
        if (!adv.valid) ++invalid;
        max_distortion = std::max(max_distortion, adv.linf_distortion);
        adv_ok[i] = classify(adv.image) == eval.labels[i];
      }
      std::cerr << "invalid examples: " << invalid << "/" << n
                << ", max l-inf distortion " << max_distortion << "\n";
    } else if (at_attack == "eot") {
      if (!victim_key) throw bwt::FormatError("eot needs --key");
      std::vector<bwt::DefenseKey> keys;
      for (int i = 0; i < at_eot_keys; ++i)
        keys.push_back(wrong_key(0x1000 + i));
      run_per_image([&](const bwt::ImageTensor& x, int y,
                        const bwt::AttackConfig& per) {
        return bwt::eot_pgd(model, keys, x, y, per);
      });
    } else if (at_attack == "transfer") {
      if (!victim_key) throw bwt::FormatError("transfer needs --key");
      bwt::Classifier::TrainConfig recipe;
      recipe.seed = at_seed;
      const auto res = bwt::transferability_attack(
          data.train, eval, wrong_key(0xA5A5A5A5DEADBEEFULL), model,
          *victim_key, recipe, cfg);
      row.clean_acc = res.victim_clean_acc;
      row.asr_eq12 = res.asr_eq12;
      row.asr_prefiltered = res.asr_prefiltered;
      write_text(at_out, bwt::report_csv_header() + bwt::report_csv_row(row));
      return;
    } else {
      throw CLI::ValidationError("unknown attack: " + at_attack);
    }

    const bwt::AsrResult asr = bwt::asr_from_outcomes(clean_ok, adv_ok);
    row.clean_acc = asr.clean_acc;
    row.asr_eq12 = asr.asr_eq12;
    row.asr_prefiltered = asr.asr_prefiltered;
    write_text(at_out, bwt::report_csv_header() + bwt::report_csv_row(row));
  });

  // --- experiment ---
  auto* ex = app.add_subcommand("experiment", "Run a report grid from a config");
  std::string ex_config, ex_out = "report.csv";
  bool ex_timing = false;
  ex->add_option("--config", ex_config, "config file")->required();
  ex->add_option("-o,--output", ex_out, "report CSV path");
  ex->add_flag("--timing", ex_timing,
               "record wall time (breaks byte-reproducibility)");
  ex->callback([&] {
    const auto cfg = bwt::load_experiment_config(ex_config);
    const auto rows = bwt::run_experiment(cfg, ex_timing);
    write_text(ex_out, bwt::render_report_csv(rows));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const bwt::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const bwt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
}
