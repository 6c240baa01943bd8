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

#include "arionet/encoder.hpp"

#include "arionet/errors.hpp"

namespace arionet::model {

void EncoderConfig::validate() const {
  if (blocks == 0 || heads == 0 || d_model == 0 || ffn_dim == 0 || proj_dim == 0 ||
      input_dim == 0) {
    throw ConfigError("encoder: all dimensions must be positive");
  }
  if (d_model % heads != 0) {
    throw ConfigError("encoder: d_model " + std::to_string(d_model) +
                      " is not divisible by heads " + std::to_string(heads));
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("encoder: dropout must lie in [0, 1)");
  }
}

template <typename T>
Tensor<T> to_tensor(const Matrix<float>& m) {
  std::vector<T> data(m.data().begin(), m.data().end());
  return Tensor<T>::from_data({m.rows(), m.cols()}, std::move(data));
}

template <typename T>
ChromaEncoder<T>::ChromaEncoder(const EncoderConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), dropout_rng_(seed ^ 0x9e3779b97f4a7c15ULL) {
  cfg_.validate();
  std::mt19937_64 rng(seed);
  input_ = Linear<T>("enc.in", cfg_.input_dim, cfg_.d_model, rng, params_);
  StackConfig sc{cfg_.blocks, cfg_.heads, cfg_.d_model, cfg_.ffn_dim, cfg_.dropout};
  stack_ = TransformerStack<T>("enc", sc, rng, params_);
  proj1_ = Linear<T>("proj.fc1", cfg_.d_model, cfg_.d_model, rng, params_);
  proj2_ = Linear<T>("proj.fc2", cfg_.d_model, cfg_.proj_dim, rng, params_);
}

template <typename T>
EncoderOutput<T> ChromaEncoder<T>::forward(const Tensor<T>& chroma) {
  if (chroma.rank() != 2 || chroma.dim(0) != cfg_.input_dim) {
    throw InvalidArgument("encoder: expected chroma [" + std::to_string(cfg_.input_dim) +
                          ", T], got " + nn::shape_str(chroma.shape()));
  }
  if (chroma.dim(1) == 0) throw InvalidArgument("encoder: chromagram has no frames");

  auto x = input_(nn::transpose(chroma));
  if (cfg_.positional_encoding) {
    x = nn::add(x, positional_encoding<T>(chroma.dim(1), cfg_.d_model));
  }
  x = stack_.forward(x, training_, &dropout_rng_);

  EncoderOutput<T> out;
  out.h = nn::mean(x, 0);
  out.u = proj2_(nn::relu(proj1_(out.h)));
  out.u_unit = nn::l2_normalize(out.u);
  return out;
}

template Tensor<float> to_tensor<float>(const Matrix<float>&);
template Tensor<double> to_tensor<double>(const Matrix<float>&);
template class ChromaEncoder<float>;
template class ChromaEncoder<double>;

}  // namespace arionet::model
