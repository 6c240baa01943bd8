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

// Post-norm transformer blocks over a single [T, d_model] sequence.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "arionet/tensor.hpp"

namespace arionet::model {

using nn::ParamList;
using nn::Tensor;

/// Sinusoidal table: PE(t, 2i) = sin(t / 10000^(2i/d)), PE(t, 2i+1) = cos(...).
template <typename T>
Tensor<T> positional_encoding(std::size_t length, std::size_t d_model);

/// Affine map y = x W + b with W stored [in, out].
template <typename T>
struct Linear {
  Tensor<T> weight;
  Tensor<T> bias;

  Linear() = default;
  Linear(const std::string& name, std::size_t in, std::size_t out, std::mt19937_64& rng,
         ParamList<T>& registry);

  Tensor<T> operator()(const Tensor<T>& x) const;
};

template <typename T>
struct LayerNormAffine {
  Tensor<T> gamma;
  Tensor<T> beta;

  LayerNormAffine() = default;
  LayerNormAffine(const std::string& name, std::size_t dim, ParamList<T>& registry);

  Tensor<T> operator()(const Tensor<T>& x) const;
};

template <typename T>
struct AttentionParams {
  Linear<T> query;
  Linear<T> key;
  Linear<T> value;
  Linear<T> output;
  std::size_t heads = 1;
};

template <typename T>
struct AttentionResult {
  Tensor<T> output;                 // [T, d_model]
  std::vector<Tensor<T>> weights;   // per head [T, T], filled on request
};

/// Scaled dot-product attention per head (scale 1/sqrt(d_head)), heads
/// concatenated, then the output projection.
template <typename T>
AttentionResult<T> multi_head_attention(const Tensor<T>& x, const AttentionParams<T>& p,
                                        bool keep_weights = false);

struct StackConfig {
  std::size_t blocks = 4;
  std::size_t heads = 4;
  std::size_t d_model = 128;
  std::size_t ffn_dim = 512;
  double dropout = 0.2;
};

/// Stack of post-norm blocks: LN(x + Drop(MHA(x))), then LN(x + Drop(FFN(x)))
/// with a ReLU feed-forward.
template <typename T>
class TransformerStack {
 public:
  TransformerStack() = default;
  TransformerStack(const std::string& prefix, const StackConfig& cfg, std::mt19937_64& rng,
                   ParamList<T>& registry);

  /// `dropout_rng` may be null when not training.
  Tensor<T> forward(const Tensor<T>& x, bool training, std::mt19937_64* dropout_rng) const;

  const StackConfig& config() const { return cfg_; }

 private:
  struct Block {
    AttentionParams<T> attn;
    LayerNormAffine<T> norm1;
    Linear<T> ff1;
    Linear<T> ff2;
    LayerNormAffine<T> norm2;
  };

  StackConfig cfg_;
  std::vector<Block> blocks_;
};

}  // namespace arionet::model
