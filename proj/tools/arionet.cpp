// Copyright 2026 The arionet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// arionet command-line tool.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 invalid
// configuration.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "arionet/app.hpp"
#include "arionet/binary_io.hpp"
#include "arionet/checkpoint.hpp"
#include "arionet/errors.hpp"
#include "arionet/eval.hpp"
#include "arionet/kernels.hpp"
#include "arionet/pipeline.hpp"
#include "arionet/ssl.hpp"
#include "arionet/synth.hpp"
#include "arionet/temporal.hpp"

namespace {

using namespace arionet;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;

struct Paths {
  std::string manifest, store, out, encoder, model, report, temporal, loss_csv, trace_csv;
};

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) warn(w);
}

int cmd_synth(const Paths& p, const synth::SynthOptions& opts) {
  const auto manifest = synth::write_synthetic_dataset(p.out, opts);
  std::cout << "wrote " << opts.species * opts.recordings_per_species << " recordings and "
            << manifest.string() << '\n';
  return 0;
}

int cmd_extract(const Paths& p, const app::RunConfig& cfg) {
  const auto rows = app::read_manifest(p.manifest);
  const auto recordings = app::load_recordings(rows, cfg.dsp.sample_rate);
  pipeline::ExtractOptions opts{cfg.dsp, cfg.window, cfg.cap, cfg.seed};
  const auto result = pipeline::run_extraction(recordings, opts);

  std::cout << "window: " << result.window_samples << " samples ("
            << std::fixed << std::setprecision(3)
            << static_cast<double>(result.window_samples) / cfg.dsp.sample_rate << " s)\n";
  std::cout << "kept after energy filtering: " << std::setprecision(1)
            << result.kept_fraction * 100.0 << "% of samples\n";
  std::cout << std::left << std::setw(24) << "species" << std::right << std::setw(11)
            << "recordings" << std::setw(9) << "windows" << std::setw(9) << "skipped"
            << std::setw(7) << "kept" << '\n';
  for (const auto& s : result.stats) {
    std::cout << std::left << std::setw(24) << s.name << std::right << std::setw(11)
              << s.recordings << std::setw(9) << s.windows << std::setw(9) << s.skipped
              << std::setw(7) << s.kept << '\n';
    if (s.short_recordings > 0) {
      warn(s.name + ": " + std::to_string(s.short_recordings) +
           " recording(s) too short for " + std::to_string(cfg.dsp.chroma_min_frames) +
           " chroma frames after filtering");
    }
  }
  for (const auto& name : result.excluded_species) {
    warn("species " + name + " excluded: no window with at least " +
         std::to_string(cfg.dsp.chroma_min_frames) + " chroma frames");
  }
  if (result.store.records.empty()) throw InvalidArgument("extraction produced no segments");
  pipeline::write_store(result.store, p.out);
  std::cout << "stored " << result.store.size() << " segments of "
            << result.store.species_count() << " species in " << p.out << '\n';
  return 0;
}

int cmd_pretrain(const Paths& p, const app::RunConfig& cfg) {
  const auto store = pipeline::read_store(p.store);
  auto result = ssl::pretrain(store, cfg.pretrain, [](std::size_t epoch, double loss, double cos) {
    std::cout << "epoch " << epoch << "  loss " << std::fixed << std::setprecision(5) << loss
              << "  pos_cos " << cos << '\n';
  });
  print_warnings(result.warnings);
  if (const auto n = ssl::renormalization_warnings(); n > 0) {
    warn(std::to_string(n) + " batch(es) had non-unit embeddings and were renormalized");
  }
  nn::write_checkpoint(p.out, nn::to_checkpoint(result.encoder.params()));
  if (!p.loss_csv.empty()) ssl::write_loss_trace(p.loss_csv, result.loss_trace);
  std::cout << "saved encoder to " << p.out << '\n';
  return 0;
}

int cmd_train_temporal(const Paths& p, const app::RunConfig& cfg) {
  const auto store = pipeline::read_store(p.store);
  app::check_temporal_fits(cfg.temporal, store);
  auto result = temporal::train_temporal(store, cfg.temporal, [](const temporal::TemporalEpoch& e) {
    std::cout << "epoch " << e.epoch << "  train_mse " << std::fixed << std::setprecision(6)
              << e.train_mse << "  val_mse " << e.val_mse << "  val_cos " << e.val_cosine
              << "  val_mae " << e.val_mae << '\n';
  });
  print_warnings(result.warnings);
  if (result.stopped_early) {
    std::cout << "early stop after " << result.trace.size() << " epochs; best epoch "
              << result.best_epoch << '\n';
  }
  nn::write_checkpoint(p.out, nn::to_checkpoint(result.model.params()));
  if (!p.trace_csv.empty()) temporal::write_temporal_trace(p.trace_csv, result.trace);
  std::cout << "saved temporal model to " << p.out << '\n';
  return 0;
}

eval::EmbeddingTable embed_store(const pipeline::FeatureStore& store, const std::string& encoder,
                                 const app::RunConfig& cfg) {
  auto enc = app::load_encoder(encoder, cfg.pretrain.encoder);
  return eval::embed_all(store, enc);
}

int cmd_classify(const Paths& p, const app::RunConfig& cfg) {
  const auto store = pipeline::read_store(p.store);
  if (store.species_count() < 2) {
    throw InvalidArgument("classification needs at least 2 species; store has " +
                          std::to_string(store.species_count()));
  }
  const auto table = embed_store(store, p.encoder, cfg);
  const auto split = eval::stratified_split(table.labels, cfg.classifier.test_fraction, cfg.seed);
  const auto x = eval::select_rows(table.values, split.train);
  std::vector<eval::Label> y;
  for (auto i : split.train) y.push_back(table.labels[i]);

  eval::Classifier c;
  c.kind = cfg.classifier.kind;
  c.class_names = store.species;
  c.split_seed = cfg.seed;
  c.test_fraction = cfg.classifier.test_fraction;
  if (c.kind == eval::ClassifierKind::kForest) {
    eval::ForestOptions fo;
    fo.trees = cfg.classifier.trees;
    fo.seed = cfg.seed;
    c.forest = eval::fit_forest(x, y, fo);
  } else {
    c.k = cfg.classifier.knn_k;
    c.train_x = x;
    c.train_y = y;
  }
  eval::write_classifier(p.out, c);
  std::cout << "trained " << (c.kind == eval::ClassifierKind::kForest ? "random forest" : "k-NN")
            << " on " << split.train.size() << " segments (" << split.test.size()
            << " held out); saved to " << p.out << '\n';
  return 0;
}

int cmd_evaluate(const Paths& p, const app::RunConfig& cfg) {
  const auto store = pipeline::read_store(p.store);
  const auto clf = eval::read_classifier(p.model);
  if (clf.class_names != store.species) {
    throw InvalidArgument("classifier labels do not match the store's species table");
  }
  if (store.species_count() < 2) throw InvalidArgument("evaluation needs at least 2 species");
  const auto table = embed_store(store, p.encoder, cfg);
  const auto split = eval::stratified_split(table.labels, clf.test_fraction, clf.split_seed);
  if (split.test.empty()) throw InvalidArgument("held-out split is empty");
  const auto pred = clf.predict(eval::select_rows(table.values, split.test));
  std::vector<eval::Label> truth;
  for (auto i : split.test) truth.push_back(table.labels[i]);
  const auto cm = eval::ConfusionMatrix::from_labels(truth, pred, store.species_count());
  const auto report = eval::metrics(cm);
  eval::write_report_csv(p.report, report, store.species);
  std::cout << "held-out segments: " << split.test.size() << '\n';
  std::cout << eval::report_table(report, store.species);
  return 0;
}

int cmd_embed(const Paths& p, const app::RunConfig& cfg) {
  const auto store = pipeline::read_store(p.store);
  const auto table = embed_store(store, p.encoder, cfg);
  eval::write_embeddings_csv(p.out, table, store.species);
  std::cout << "wrote " << table.values.rows() << " embeddings of dimension "
            << table.values.cols() << " to " << p.out << '\n';
  return 0;
}

int cmd_predict_frames(const Paths& p, const app::RunConfig& cfg) {
  const auto store = pipeline::read_store(p.store);
  auto model = app::load_temporal(p.temporal, cfg.temporal);
  const auto& tc = model.config();
  app::check_temporal_fits(tc, store);

  std::vector<Matrix<float>> chromas;
  for (const auto& r : store.records) chromas.push_back(r.chroma);
  const auto samples = temporal::make_samples(chromas, tc.context, tc.horizon);
  const auto m = temporal::evaluate_temporal(model, samples);

  std::ostringstream csv;
  csv << std::setprecision(9);
  csv << "segment_id,species,frame,correlation,orig_mean,pred_mean,orig_max,pred_max\n";
  std::size_t undefined = 0;
  std::vector<Matrix<float>> targets;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& orig = samples[i].target;
    const auto& pred = m.predictions[i];
    targets.push_back(orig);
    for (std::size_t f = 0; f < orig.cols(); ++f) {
      const auto o = orig.column(f);
      const auto q = pred.column(f);
      csv << store.records[i].segment_id << ',' << store.species[store.records[i].species_id]
          << ',' << f << ',';
      try {
        csv << eval::pitch_class_correlation(o, q);
      } catch (const InvalidArgument&) {
        csv << "nan";
        ++undefined;
      }
      const auto mean = [](const std::vector<float>& v) {
        double s = 0.0;
        for (float x : v) s += x;
        return s / static_cast<double>(v.size());
      };
      csv << ',' << mean(o) << ',' << mean(q) << ',' << *std::max_element(o.begin(), o.end())
          << ',' << *std::max_element(q.begin(), q.end()) << '\n';
    }
  }
  io::write_text_atomic(p.out, csv.str());
  if (undefined > 0) warn(std::to_string(undefined) + " frame(s) constant; correlation undefined");

  const auto stats = eval::frame_distribution_stats(targets, m.predictions);
  std::cout << std::fixed << std::setprecision(4);
  std::cout << "frames: " << samples.size() * tc.horizon << "  cosine " << m.cosine << "  mae "
            << m.mae << "  mse " << m.mse << '\n';
  std::cout << "orig mean " << stats.orig_mean.mean << " +- " << stats.orig_mean.std
            << "   pred mean " << stats.pred_mean.mean << " +- " << stats.pred_mean.std << '\n';
  std::cout << "orig max  " << stats.orig_max.mean << " +- " << stats.orig_max.std
            << "   pred max  " << stats.pred_max.mean << " +- " << stats.pred_max.std << '\n';
  std::cout << std::setprecision(2) << "mean delta " << stats.mean_delta_pct << "%  std delta "
            << stats.std_delta_pct << "%  max delta " << stats.max_delta_pct << "%\n";
  return 0;
}

// Fills options that were not given on the command line from the config file.
void apply_config_file(CLI::App& root, CLI::App& sub,
                       const std::map<std::string, std::string>& values) {
  std::set<std::string> known;
  auto key_of = [](const CLI::Option* o) {
    auto k = o->get_lnames().empty() ? std::string() : o->get_lnames().front();
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
  };
  for (const auto* o : root.get_options()) known.insert(key_of(o));
  for (const auto* s : root.get_subcommands({})) {
    for (const auto* o : s->get_options()) known.insert(key_of(o));
  }
  for (const auto& [key, value] : values) {
    if (!known.count(key)) throw ConfigError("config file: unknown key '" + key + "'");
  }
  for (auto* app : {&root, &sub}) {
    for (auto* o : app->get_options()) {
      const auto key = key_of(o);
      if (key.empty() || key == "config" || o->count() > 0) continue;
      const auto it = values.find(key);
      if (it == values.end()) continue;
      try {
        o->add_result(it->second);
        o->run_callback();
      } catch (const CLI::Error& e) {
        throw ConfigError("config file: " + key + ": " + e.what());
      }
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  kernels::apply_thread_env();

  CLI::App root{"arionet: self-supervised birdsong representations from chromagram sequences"};
  root.require_subcommand(1);
  root.fallthrough();

  app::RunConfig cfg;
  Paths p;
  synth::SynthOptions synth_opts;
  std::string config_path;
  std::string classifier_kind = "forest";
  bool no_augment = false, no_pitch = false, no_time = false, no_chroma = false;
  std::size_t window = 0, cap = 0;

  root.add_option("--config", config_path, "key = value file; flags override it")
      ->check(CLI::ExistingFile);
  auto* seed_opt = root.add_option("--seed", cfg.seed, "seed for every stochastic step");

  auto* synth = root.add_subcommand("synth", "write the synthetic multi-species corpus");
  synth->add_option("--out", p.out, "output directory")->required();
  synth->add_option("--species", synth_opts.species, "species count (1 to 6)")
      ->check(CLI::Range(1, 6));
  synth->add_option("--recordings", synth_opts.recordings_per_species, "recordings per species")
      ->check(CLI::PositiveNumber);

  auto* extract = root.add_subcommand("extract", "filter, window and featurize a manifest");
  extract->add_option("--manifest", p.manifest, "CSV with path,species")
      ->required()->check(CLI::ExistingFile);
  extract->add_option("--out", p.out, "feature store path")->required();
  extract->add_option("--sr", cfg.dsp.sample_rate, "sample rate");
  extract->add_option("--n-fft", cfg.dsp.n_fft, "FFT size");
  extract->add_option("--hop", cfg.dsp.hop, "hop length");
  extract->add_option("--n-mels", cfg.dsp.n_mels, "mel bands");
  extract->add_option("--energy-ratio", cfg.dsp.energy_ratio, "silence threshold / peak");
  extract->add_option("--chroma-min-frames", cfg.dsp.chroma_min_frames, "minimum chroma frames");
  extract->add_option("--rolloff", cfg.dsp.rolloff_ratio, "spectral rolloff fraction");
  extract->add_option("--window", window, "window override in samples");
  extract->add_option("--cap", cap, "maximum segments per species");

  auto add_encoder_dims = [&](CLI::App* sub, bool full) {
    sub->add_option("--heads", cfg.pretrain.encoder.heads, "attention heads");
    if (!full) return;
    sub->add_option("--blocks", cfg.pretrain.encoder.blocks, "transformer blocks");
    sub->add_option("--d-model", cfg.pretrain.encoder.d_model, "model width");
    sub->add_option("--ffn-dim", cfg.pretrain.encoder.ffn_dim, "feed-forward width");
    sub->add_option("--proj-dim", cfg.pretrain.encoder.proj_dim, "projection size");
    sub->add_option("--dropout", cfg.pretrain.encoder.dropout, "dropout rate");
  };

  auto* pretrain = root.add_subcommand("pretrain", "contrastive pretraining of the encoder");
  pretrain->add_option("--store", p.store, "feature store")->required()->check(CLI::ExistingFile);
  pretrain->add_option("--out", p.out, "encoder checkpoint")->required();
  pretrain->add_option("--loss-csv", p.loss_csv, "per-epoch loss trace");
  add_encoder_dims(pretrain, true);
  pretrain->add_option("--tau", cfg.pretrain.temperature, "NT-Xent temperature");
  pretrain->add_option("--lr", cfg.pretrain.adam.lr, "learning rate");
  pretrain->add_option("--gamma", cfg.pretrain.adam.gamma, "per-epoch lr decay");
  pretrain->add_option("--batch", cfg.pretrain.batch, "batch size");
  pretrain->add_option("--epochs", cfg.pretrain.epochs, "epochs");
  pretrain->add_option("--pitch-shift-range", cfg.pretrain.augment.pitch_shift_range,
                       "max semitone shift");
  pretrain->add_option("--time-mask-max", cfg.pretrain.augment.time_mask_max,
                       "max masked fraction of frames");
  pretrain->add_option("--chroma-mask-max-rows", cfg.pretrain.augment.chroma_mask_max_rows,
                       "max masked pitch classes");
  pretrain->add_flag("--no-pitch-shift", no_pitch, "disable pitch shifting");
  pretrain->add_flag("--no-time-mask", no_time, "disable time masking");
  pretrain->add_flag("--no-chroma-mask", no_chroma, "disable chroma masking");
  pretrain->add_flag("--no-augment", no_augment, "disable every augmentation");

  auto add_temporal = [&](CLI::App* sub) {
    sub->add_option("--t", cfg.temporal.context, "context frames");
    sub->add_option("--k", cfg.temporal.horizon, "predicted frames");
    sub->add_option("--temporal-heads", cfg.temporal.heads, "attention heads");
  };
  auto* train_temporal = root.add_subcommand("train-temporal", "future-frame predictor");
  train_temporal->add_option("--store", p.store, "feature store")
      ->required()->check(CLI::ExistingFile);
  train_temporal->add_option("--out", p.out, "temporal checkpoint")->required();
  train_temporal->add_option("--trace-csv", p.trace_csv, "per-epoch metrics");
  add_temporal(train_temporal);
  train_temporal->add_option("--temporal-blocks", cfg.temporal.blocks, "transformer blocks");
  train_temporal->add_option("--temporal-d-model", cfg.temporal.d_model, "model width");
  train_temporal->add_option("--temporal-ffn-dim", cfg.temporal.ffn_dim, "feed-forward width");
  train_temporal->add_option("--temporal-lr", cfg.temporal.lr, "learning rate");
  train_temporal->add_option("--temporal-batch", cfg.temporal.batch, "batch size");
  train_temporal->add_option("--max-epochs", cfg.temporal.max_epochs, "epoch limit");
  train_temporal->add_option("--patience", cfg.temporal.patience, "early-stop patience");
  train_temporal->add_option("--min-delta", cfg.temporal.min_delta, "early-stop min delta");

  auto* classify = root.add_subcommand("classify", "fit a classifier on frozen embeddings");
  classify->add_option("--store", p.store, "feature store")->required()->check(CLI::ExistingFile);
  classify->add_option("--encoder", p.encoder, "encoder checkpoint")
      ->required()->check(CLI::ExistingFile);
  classify->add_option("--out", p.out, "classifier file")->required();
  classify->add_option("--classifier", classifier_kind, "forest or knn")
      ->check(CLI::IsMember({"forest", "knn"}));
  classify->add_option("--trees", cfg.classifier.trees, "forest size");
  classify->add_option("--knn-k", cfg.classifier.knn_k, "neighbours");
  classify->add_option("--test-fraction", cfg.classifier.test_fraction, "held-out fraction");
  add_encoder_dims(classify, false);

  auto* evaluate = root.add_subcommand("evaluate", "score a classifier on the held-out split");
  evaluate->add_option("--store", p.store, "feature store")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--encoder", p.encoder, "encoder checkpoint")
      ->required()->check(CLI::ExistingFile);
  evaluate->add_option("--model", p.model, "classifier file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--report", p.report, "report CSV")->required();
  add_encoder_dims(evaluate, false);

  auto* embed = root.add_subcommand("embed", "export frozen embeddings");
  embed->add_option("--store", p.store, "feature store")->required()->check(CLI::ExistingFile);
  embed->add_option("--encoder", p.encoder, "encoder checkpoint")
      ->required()->check(CLI::ExistingFile);
  embed->add_option("--out", p.out, "embedding CSV")->required();
  add_encoder_dims(embed, false);

  auto* predict = root.add_subcommand("predict-frames", "future-frame statistics per segment");
  predict->add_option("--store", p.store, "feature store")->required()->check(CLI::ExistingFile);
  predict->add_option("--temporal", p.temporal, "temporal checkpoint")
      ->required()->check(CLI::ExistingFile);
  predict->add_option("--out", p.out, "per-frame CSV")->required();
  predict->add_option("--temporal-heads", cfg.temporal.heads, "attention heads");

  try {
    root.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = root.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  CLI::App* active = root.get_subcommands().front();
  try {
    if (!config_path.empty()) {
      apply_config_file(root, *active, app::read_config_file(config_path));
    }
    if (window > 0) cfg.window = window;
    if (cap > 0) cfg.cap = cap;
    if (no_augment) {
      no_pitch = no_time = no_chroma = true;
    }
    cfg.pretrain.augment.pitch_shift = !no_pitch;
    cfg.pretrain.augment.time_mask = !no_time;
    cfg.pretrain.augment.chroma_mask = !no_chroma;
    cfg.classifier.kind =
        classifier_kind == "knn" ? eval::ClassifierKind::kKnn : eval::ClassifierKind::kForest;
    if (seed_opt->count() > 0) synth_opts.seed = cfg.seed;
    cfg.apply_seed();
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (active == synth) return cmd_synth(p, synth_opts);
    if (active == extract) return cmd_extract(p, cfg);
    if (active == pretrain) return cmd_pretrain(p, cfg);
    if (active == train_temporal) return cmd_train_temporal(p, cfg);
    if (active == classify) return cmd_classify(p, cfg);
    if (active == evaluate) return cmd_evaluate(p, cfg);
    if (active == embed) return cmd_embed(p, cfg);
    if (active == predict) return cmd_predict_frames(p, cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
