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

// Chromagram sequence encoder and projection head.
//
//   chroma [12, T] -> transpose -> linear 12->d_model (+ sinusoidal PE)
//   -> post-norm transformer stack -> mean over time (h)
//   -> linear -> ReLU -> linear (u) -> L2 normalize (u_unit)
//
// Checkpoint tensor names start with "enc." (input map and blocks) or
// "proj." (projection head).

#pragma once

#include <cstdint>
#include <random>

#include "arionet/matrix.hpp"
#include "arionet/tensor.hpp"
#include "arionet/transformer.hpp"

namespace arionet::model {

struct EncoderConfig {
  std::size_t blocks = 4;
  std::size_t heads = 4;
  std::size_t d_model = 128;
  std::size_t ffn_dim = 512;
  std::size_t proj_dim = 256;
  double dropout = 0.2;
  std::size_t input_dim = 12;
  bool positional_encoding = true;

  /// Throws ConfigError on a non-positive size, an invalid dropout, or
  /// d_model not divisible by heads.
  void validate() const;
};

template <typename T>
struct EncoderOutput {
  Tensor<T> h;       // [1, d_model] pooled
  Tensor<T> u;       // [1, proj_dim]
  Tensor<T> u_unit;  // [1, proj_dim], unit norm
};

/// Builds a constant [rows, cols] tensor from a chromagram matrix.
template <typename T>
Tensor<T> to_tensor(const Matrix<float>& m);

template <typename T>
class ChromaEncoder {
 public:
  ChromaEncoder(const EncoderConfig& cfg, std::uint64_t seed);

  ChromaEncoder(const ChromaEncoder&) = delete;
  ChromaEncoder& operator=(const ChromaEncoder&) = delete;
  ChromaEncoder(ChromaEncoder&&) = default;
  ChromaEncoder& operator=(ChromaEncoder&&) = default;

  /// `chroma` is [input_dim, T] with T >= 1.
  EncoderOutput<T> forward(const Tensor<T>& chroma);
  EncoderOutput<T> forward(const Matrix<float>& chroma) { return forward(to_tensor<T>(chroma)); }

  /// Training mode enables dropout; eval mode is deterministic.
  void set_training(bool on) { training_ = on; }
  bool training() const { return training_; }

  ParamList<T>& params() { return params_; }
  const ParamList<T>& params() const { return params_; }
  const EncoderConfig& config() const { return cfg_; }

 private:
  EncoderConfig cfg_;
  ParamList<T> params_;
  Linear<T> input_;
  TransformerStack<T> stack_;
  Linear<T> proj1_;
  Linear<T> proj2_;
  std::mt19937_64 dropout_rng_;
  bool training_ = false;
};

}  // namespace arionet::model
