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

// Run configuration, manifests, config files, and model loading used by the
// command-line tool.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arionet/checkpoint.hpp"
#include "arionet/encoder.hpp"
#include "arionet/eval.hpp"
#include "arionet/pipeline.hpp"
#include "arionet/ssl.hpp"
#include "arionet/temporal.hpp"

namespace arionet::app {

struct ManifestRow {
  std::filesystem::path path;
  std::string species;
};

/// CSV with a `path,species` header. Relative paths resolve against the
/// manifest's directory. Throws ConfigError on a malformed row, an empty
/// species, or a missing audio file.
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

/// `key = value` lines; `#` starts a comment. Throws ConfigError with the
/// line number on malformed input or a repeated key.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

struct ClassifierConfig {
  eval::ClassifierKind kind = eval::ClassifierKind::kForest;
  std::size_t trees = 100;
  std::size_t knn_k = 5;
  double test_fraction = 0.2;
};

struct RunConfig {
  pipeline::DspConfig dsp;
  std::optional<std::size_t> window;
  std::optional<std::size_t> cap;
  ssl::PretrainConfig pretrain;
  temporal::TemporalConfig temporal;
  ClassifierConfig classifier;
  std::uint64_t seed = 0;

  RunConfig();
  /// Copies `seed` into every seeded component.
  void apply_seed();
  /// Throws ConfigError on any violated constraint.
  void validate() const;
};

/// Throws ConfigError when t + k exceeds the shortest stored chromagram.
void check_temporal_fits(const temporal::TemporalConfig& cfg, const pipeline::FeatureStore& store);

/// Block count, widths and projection size read from tensor shapes; heads
/// and dropout come from `base`.
model::EncoderConfig encoder_config_from(const std::vector<nn::CheckpointTensor>& tensors,
                                         model::EncoderConfig base);
temporal::TemporalConfig temporal_config_from(const std::vector<nn::CheckpointTensor>& tensors,
                                              temporal::TemporalConfig base);

model::ChromaEncoder<float> load_encoder(const std::filesystem::path& path,
                                         const model::EncoderConfig& base);
temporal::TemporalPredictor<float> load_temporal(const std::filesystem::path& path,
                                                 const temporal::TemporalConfig& base);

/// Decodes every manifest row at `sample_rate`, in parallel.
std::vector<pipeline::LabeledRecording> load_recordings(const std::vector<ManifestRow>& rows,
                                                        int sample_rate);

}  // namespace arionet::app
