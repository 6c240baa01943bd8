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

// Future-frame prediction from a chroma context window.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "arionet/matrix.hpp"
#include "arionet/optim.hpp"
#include "arionet/pipeline.hpp"
#include "arionet/transformer.hpp"

namespace arionet::temporal {

using Chroma = Matrix<float>;
using nn::Tensor;

struct TemporalConfig {
  std::size_t blocks = 2;
  std::size_t heads = 2;
  std::size_t d_model = 64;
  std::size_t ffn_dim = 256;
  double dropout = 0.0;
  std::size_t context = 12;  // t
  std::size_t horizon = 1;   // k
  double lr = 1e-4;
  double gamma = 1.0;
  std::size_t batch = 32;
  std::size_t max_epochs = 300;
  std::size_t patience = 20;
  double min_delta = 1e-5;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;

  /// Throws ConfigError. Requires t >= 1, 1 <= k <= t.
  void validate() const;
};

/// Columns [0, t) and [t, t + k). Throws if T < t + k.
std::pair<Chroma, Chroma> split_context_target(const Chroma& c, std::size_t t, std::size_t k);

template <typename T>
class TemporalPredictor {
 public:
  TemporalPredictor(const TemporalConfig& cfg, std::uint64_t seed);

  TemporalPredictor(const TemporalPredictor&) = delete;
  TemporalPredictor& operator=(const TemporalPredictor&) = delete;
  TemporalPredictor(TemporalPredictor&&) = default;
  TemporalPredictor& operator=(TemporalPredictor&&) = default;

  /// [12, t] context -> [12, k] prediction. Clamped to [0, 1] in eval mode.
  Tensor<T> predict(const Tensor<T>& context);
  Tensor<T> predict(const Chroma& context);

  void set_training(bool on) { training_ = on; }
  bool training() const { return training_; }
  nn::ParamList<T>& params() { return params_; }
  const nn::ParamList<T>& params() const { return params_; }
  const TemporalConfig& config() const { return cfg_; }

 private:
  TemporalConfig cfg_;
  nn::ParamList<T> params_;
  model::Linear<T> input_;
  model::TransformerStack<T> stack_;
  model::Linear<T> head_;
  std::mt19937_64 dropout_rng_;
  bool training_ = false;
};

/// (1/samples) * sum of squared differences. `pred` and `target` hold the
/// samples stacked along the first axis.
template <typename T>
Tensor<T> mse(const Tensor<T>& pred, const Tensor<T>& target, std::size_t samples = 1);

struct TemporalSample {
  Chroma context;
  Chroma target;
};

std::vector<TemporalSample> make_samples(const std::vector<Chroma>& chromas, std::size_t t,
                                         std::size_t k);

struct TemporalMetrics {
  double mse = 0.0;     // per sample
  double cosine = 0.0;  // mean over predicted frames
  double mae = 0.0;     // mean over elements
  std::vector<Chroma> predictions;
};

/// Eval-mode predictions and aggregate metrics.
TemporalMetrics evaluate_temporal(TemporalPredictor<float>& model,
                                  const std::vector<TemporalSample>& samples);

struct TemporalEpoch {
  std::size_t epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
  double val_cosine = 0.0;
  double val_mae = 0.0;
};

struct TemporalResult {
  TemporalPredictor<float> model;
  std::vector<TemporalEpoch> trace;
  std::size_t best_epoch = 0;  // 0 if no epoch ran
  bool stopped_early = false;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> val_indices;
  std::vector<std::string> warnings;
};

using TemporalCallback = std::function<void(const TemporalEpoch&)>;

/// Seeded split, Adam training with early stopping on validation MSE. The
/// returned model holds the best-validation weights.
TemporalResult train_temporal(const std::vector<Chroma>& chromas, const TemporalConfig& cfg,
                              const TemporalCallback& on_epoch = {});
TemporalResult train_temporal(const pipeline::FeatureStore& store, const TemporalConfig& cfg,
                              const TemporalCallback& on_epoch = {});

/// CSV `epoch,train_mse,val_mse,val_cosine,val_mae`.
void write_temporal_trace(const std::filesystem::path& path,
                          const std::vector<TemporalEpoch>& trace);

}  // namespace arionet::temporal
