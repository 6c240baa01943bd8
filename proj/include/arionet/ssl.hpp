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

// Contrastive pretraining: chroma-view augmentations, NT-Xent, and the
// training loop.

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "arionet/encoder.hpp"
#include "arionet/matrix.hpp"
#include "arionet/optim.hpp"
#include "arionet/pipeline.hpp"
#include "arionet/tensor.hpp"

namespace arionet::ssl {

using Chroma = Matrix<float>;
using nn::Tensor;

struct AugmentationSpec {
  int pitch_shift_range = 2;     // semitones, k drawn from [-range, range]
  double time_mask_max = 0.2;    // fraction of T
  int chroma_mask_max_rows = 2;  // rows drawn from [0, max]
  bool pitch_shift = true;
  bool time_mask = true;
  bool chroma_mask = true;
  std::uint64_t seed = 0;

  static AugmentationSpec none();
  /// Throws ConfigError on negative ranges or more than 12 masked rows.
  void validate() const;
};

/// Row p moves to row (p + k) mod 12. Negative k is allowed.
Chroma pitch_shift(const Chroma& c, int k);

/// Zeros columns [start, start + width). Throws if the range exceeds T.
Chroma time_mask(const Chroma& c, std::size_t width, std::size_t start);

/// Zeros the listed rows. Throws on an out-of-range row.
Chroma chroma_mask(const Chroma& c, const std::vector<std::size_t>& rows);

/// One view: pitch shift, then chroma mask, then time mask, each with freshly
/// drawn parameters when enabled.
Chroma augment(const Chroma& c, const AugmentationSpec& spec, std::mt19937_64& rng);

std::pair<Chroma, Chroma> make_views(const Chroma& c, const AugmentationSpec& spec,
                                     std::mt19937_64& rng);

/// Count of nt_xent calls that had to renormalize non-unit inputs.
std::uint64_t renormalization_warnings();
void reset_renormalization_warnings();

/// Symmetric NT-Xent over views `za` and `zb`, each [B, d] with unit rows.
/// Rows whose norm differs from 1 by more than 1e-6 are renormalized (through
/// the graph) and the warning counter is incremented. Throws on tau <= 0,
/// B == 0, or mismatched shapes.
template <typename T>
Tensor<T> nt_xent(const Tensor<T>& za, const Tensor<T>& zb, double tau);

struct PretrainConfig {
  model::EncoderConfig encoder;
  AugmentationSpec augment;
  double temperature = 0.07;
  nn::AdamOptions adam;  // lr 1e-3, gamma 0.95
  std::size_t batch = 64;
  std::size_t epochs = 300;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PretrainResult {
  model::ChromaEncoder<float> encoder;
  std::vector<double> loss_trace;       // epoch-mean loss
  std::vector<double> positive_cosine;  // epoch-mean cosine of positive pairs
  std::size_t batch = 0;                // after clamping
  std::vector<std::string> warnings;
};

using EpochCallback = std::function<void(std::size_t epoch, double loss, double cosine)>;

PretrainResult pretrain(const std::vector<Chroma>& chromas, const PretrainConfig& cfg,
                        const EpochCallback& on_epoch = {});
PretrainResult pretrain(const pipeline::FeatureStore& store, const PretrainConfig& cfg,
                        const EpochCallback& on_epoch = {});

/// Mean loss and positive cosine over the dataset in eval mode, with views
/// drawn from `spec` (seeded by spec.seed) and sequential batches.
struct ContrastiveProbe {
  double loss = 0.0;
  double positive_cosine = 0.0;
};
ContrastiveProbe contrastive_probe(model::ChromaEncoder<float>& encoder,
                                   const std::vector<Chroma>& chromas,
                                   const AugmentationSpec& spec, double tau, std::size_t batch);

/// CSV `epoch,mean_loss`, epochs numbered from 1.
void write_loss_trace(const std::filesystem::path& path, const std::vector<double>& losses);

}  // namespace arionet::ssl
