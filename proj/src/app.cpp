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

#include "arionet/app.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <sstream>

#include "arionet/binary_io.hpp"
#include "arionet/checkpoint.hpp"
#include "arionet/errors.hpp"
#include "arionet/wav.hpp"

namespace arionet::app {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// One CSV record with RFC 4180 quoting; quoted fields may not span lines.
std::vector<std::string> split_csv(const std::string& line, bool& ok) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  ok = true;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) ok = false;
  return fields;
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return {bytes.begin(), bytes.end()};
}

const nn::CheckpointTensor& find_tensor(const std::vector<nn::CheckpointTensor>& tensors,
                                        const std::string& name) {
  for (const auto& t : tensors) {
    if (t.name == name) return t;
  }
  throw FormatError(FormatError::Kind::kInvalidRecord, "checkpoint lacks tensor " + name);
}

std::size_t count_blocks(const std::vector<nn::CheckpointTensor>& tensors,
                         const std::string& prefix) {
  std::size_t b = 0;
  const auto has = [&](std::size_t i) {
    const auto name = prefix + ".block" + std::to_string(i) + ".norm1.gamma";
    return std::any_of(tensors.begin(), tensors.end(),
                       [&](const nn::CheckpointTensor& t) { return t.name == name; });
  };
  while (has(b)) ++b;
  return b;
}

std::size_t dim(const nn::CheckpointTensor& t, std::size_t i) {
  if (i >= t.dims.size()) {
    throw FormatError(FormatError::Kind::kInvalidRecord, "checkpoint tensor " + t.name +
                                                             " has rank " +
                                                             std::to_string(t.dims.size()));
  }
  return t.dims[i];
}

}  // namespace

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  const auto base = path.parent_path();
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    bool ok = true;
    const auto fields = split_csv(line, ok);
    if (!ok || fields.size() != 2) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected path,species");
    }
    const auto file = trim(fields[0]);
    const auto species = trim(fields[1]);
    if (lineno == 1 && file == "path" && species == "species") continue;
    if (file.empty()) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": empty path");
    if (species.empty()) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": empty species name");
    }
    std::filesystem::path audio(file);
    if (audio.is_relative()) audio = base / audio;
    if (!std::filesystem::exists(audio)) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": no such file " +
                        audio.string());
    }
    rows.push_back({audio, species});
  }
  if (rows.empty()) throw ConfigError(path.string() + ": manifest has no rows");
  return rows;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    std::replace(key.begin(), key.end(), '-', '_');
    if (!out.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": repeated key " + key);
    }
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  try {
    return parse_config_text(read_text(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

RunConfig::RunConfig() { apply_seed(); }

void RunConfig::apply_seed() {
  pretrain.seed = seed;
  pretrain.augment.seed = seed;
  temporal.seed = seed;
}

void RunConfig::validate() const {
  dsp.validate();
  if (window && *window < static_cast<std::size_t>(dsp.n_fft)) {
    throw ConfigError("window must be at least n_fft samples");
  }
  if (cap && *cap == 0) throw ConfigError("cap must be positive");
  pretrain.validate();
  temporal.validate();
  if (classifier.trees == 0) throw ConfigError("trees must be positive");
  if (classifier.knn_k == 0) throw ConfigError("knn_k must be positive");
  if (!(classifier.test_fraction > 0.0 && classifier.test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in (0, 1)");
  }
}

void check_temporal_fits(const temporal::TemporalConfig& cfg,
                         const pipeline::FeatureStore& store) {
  if (store.records.empty()) throw ConfigError("feature store is empty");
  std::size_t shortest = store.records.front().chroma.cols();
  for (const auto& r : store.records) shortest = std::min(shortest, r.chroma.cols());
  if (cfg.context + cfg.horizon > shortest) {
    throw ConfigError("t + k = " + std::to_string(cfg.context + cfg.horizon) +
                      " exceeds the shortest stored chromagram (" + std::to_string(shortest) +
                      " frames)");
  }
}

model::EncoderConfig encoder_config_from(const std::vector<nn::CheckpointTensor>& tensors,
                                         model::EncoderConfig base) {
  const auto& in = find_tensor(tensors, "enc.in.weight");
  base.input_dim = dim(in, 0);
  base.d_model = dim(in, 1);
  base.blocks = count_blocks(tensors, "enc");
  if (base.blocks == 0) throw FormatError(FormatError::Kind::kInvalidRecord, "checkpoint has no encoder blocks");
  base.ffn_dim = dim(find_tensor(tensors, "enc.block0.ff1.weight"), 1);
  base.proj_dim = dim(find_tensor(tensors, "proj.fc2.weight"), 1);
  return base;
}

temporal::TemporalConfig temporal_config_from(const std::vector<nn::CheckpointTensor>& tensors,
                                              temporal::TemporalConfig base) {
  base.d_model = dim(find_tensor(tensors, "tmp.in.weight"), 1);
  base.blocks = count_blocks(tensors, "tmp");
  if (base.blocks == 0) throw FormatError(FormatError::Kind::kInvalidRecord, "checkpoint has no temporal blocks");
  base.ffn_dim = dim(find_tensor(tensors, "tmp.block0.ff1.weight"), 1);
  return base;
}

model::ChromaEncoder<float> load_encoder(const std::filesystem::path& path,
                                         const model::EncoderConfig& base) {
  const auto tensors = nn::read_checkpoint(path);
  model::ChromaEncoder<float> enc(encoder_config_from(tensors, base), 0);
  nn::load_into(enc.params(), tensors, true);
  return enc;
}

temporal::TemporalPredictor<float> load_temporal(const std::filesystem::path& path,
                                                 const temporal::TemporalConfig& base) {
  const auto tensors = nn::read_checkpoint(path);
  temporal::TemporalPredictor<float> model(temporal_config_from(tensors, base), 0);
  nn::load_into(model.params(), tensors, true);
  return model;
}

std::vector<pipeline::LabeledRecording> load_recordings(const std::vector<ManifestRow>& rows,
                                                        int sample_rate) {
  std::vector<pipeline::LabeledRecording> out(rows.size());
  std::vector<std::exception_ptr> errors(rows.size());
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      out[idx] = {audio::read_wav(rows[idx].path, sample_rate), rows[idx].species};
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace arionet::app
