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

#include "arionet/transformer.hpp"

#include <cmath>

#include "arionet/errors.hpp"

namespace arionet::model {

template <typename T>
Tensor<T> positional_encoding(std::size_t length, std::size_t d_model) {
  std::vector<T> pe(length * d_model);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t j = 0; j < d_model; ++j) {
      const std::size_t two_i = j - (j % 2);
      const double angle = static_cast<double>(t) /
                           std::pow(10000.0, static_cast<double>(two_i) /
                                                 static_cast<double>(d_model));
      pe[t * d_model + j] = static_cast<T>(j % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return Tensor<T>::from_data({length, d_model}, std::move(pe));
}

template <typename T>
Linear<T>::Linear(const std::string& name, std::size_t in, std::size_t out,
                  std::mt19937_64& rng, ParamList<T>& registry) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  std::vector<T> w(in * out);
  for (auto& v : w) v = static_cast<T>(dist(rng));
  weight = Tensor<T>::from_data({in, out}, std::move(w), true);
  bias = Tensor<T>::zeros({out}, true);
  registry.push_back({name + ".weight", weight});
  registry.push_back({name + ".bias", bias});
}

template <typename T>
Tensor<T> Linear<T>::operator()(const Tensor<T>& x) const {
  return nn::add(nn::matmul(x, weight), bias);
}

template <typename T>
LayerNormAffine<T>::LayerNormAffine(const std::string& name, std::size_t dim,
                                    ParamList<T>& registry)
    : gamma(Tensor<T>::full({dim}, T(1), true)), beta(Tensor<T>::zeros({dim}, true)) {
  registry.push_back({name + ".gamma", gamma});
  registry.push_back({name + ".beta", beta});
}

template <typename T>
Tensor<T> LayerNormAffine<T>::operator()(const Tensor<T>& x) const {
  return nn::add(nn::mul(nn::layer_norm(x), gamma), beta);
}

template <typename T>
AttentionResult<T> multi_head_attention(const Tensor<T>& x, const AttentionParams<T>& p,
                                        bool keep_weights) {
  if (x.rank() != 2) {
    throw InvalidArgument("multi_head_attention: expected [T, d_model], got " +
                          nn::shape_str(x.shape()));
  }
  const std::size_t d_model = x.dim(1);
  if (p.heads == 0 || d_model % p.heads != 0) {
    throw InvalidArgument("multi_head_attention: d_model " + std::to_string(d_model) +
                          " not divisible by " + std::to_string(p.heads) + " heads");
  }
  if (p.query.weight.dim(0) != d_model) {
    throw InvalidArgument("multi_head_attention: input " + nn::shape_str(x.shape()) +
                          " does not match projection " +
                          nn::shape_str(p.query.weight.shape()));
  }
  const std::size_t d_head = d_model / p.heads;
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(d_head)));

  const auto q = p.query(x);
  const auto k = p.key(x);
  const auto v = p.value(x);

  AttentionResult<T> result;
  std::vector<Tensor<T>> heads;
  heads.reserve(p.heads);
  for (std::size_t h = 0; h < p.heads; ++h) {
    const std::size_t lo = h * d_head, hi = lo + d_head;
    const auto qh = nn::slice(q, 1, lo, hi);
    const auto kh = nn::slice(k, 1, lo, hi);
    const auto vh = nn::slice(v, 1, lo, hi);
    const auto weights = nn::softmax(nn::mul_scalar(nn::matmul_nt(qh, kh), scale));
    heads.push_back(nn::matmul(weights, vh));
    if (keep_weights) result.weights.push_back(weights);
  }
  const auto merged = heads.size() == 1 ? heads[0] : nn::concat(heads, 1);
  result.output = p.output(merged);
  return result;
}

template <typename T>
TransformerStack<T>::TransformerStack(const std::string& prefix, const StackConfig& cfg,
                                      std::mt19937_64& rng, ParamList<T>& registry)
    : cfg_(cfg) {
  if (cfg.heads == 0 || cfg.d_model % cfg.heads != 0) {
    throw InvalidArgument("TransformerStack: d_model must be divisible by heads");
  }
  for (std::size_t b = 0; b < cfg.blocks; ++b) {
    const std::string base = prefix + ".block" + std::to_string(b);
    Block blk;
    blk.attn.query = Linear<T>(base + ".attn.query", cfg.d_model, cfg.d_model, rng, registry);
    blk.attn.key = Linear<T>(base + ".attn.key", cfg.d_model, cfg.d_model, rng, registry);
    blk.attn.value = Linear<T>(base + ".attn.value", cfg.d_model, cfg.d_model, rng, registry);
    blk.attn.output = Linear<T>(base + ".attn.out", cfg.d_model, cfg.d_model, rng, registry);
    blk.attn.heads = cfg.heads;
    blk.norm1 = LayerNormAffine<T>(base + ".norm1", cfg.d_model, registry);
    blk.ff1 = Linear<T>(base + ".ff1", cfg.d_model, cfg.ffn_dim, rng, registry);
    blk.ff2 = Linear<T>(base + ".ff2", cfg.ffn_dim, cfg.d_model, rng, registry);
    blk.norm2 = LayerNormAffine<T>(base + ".norm2", cfg.d_model, registry);
    blocks_.push_back(std::move(blk));
  }
}

template <typename T>
Tensor<T> TransformerStack<T>::forward(const Tensor<T>& x, bool training,
                                       std::mt19937_64* dropout_rng) const {
  const double rate = training && dropout_rng != nullptr ? cfg_.dropout : 0.0;
  auto drop = [&](const Tensor<T>& t) {
    return rate > 0.0 ? nn::dropout(t, rate, (*dropout_rng)()) : t;
  };
  Tensor<T> h = x;
  for (const auto& blk : blocks_) {
    const auto attn = multi_head_attention(h, blk.attn).output;
    h = blk.norm1(nn::add(h, drop(attn)));
    const auto ff = blk.ff2(nn::relu(blk.ff1(h)));
    h = blk.norm2(nn::add(h, drop(ff)));
  }
  return h;
}

template Tensor<float> positional_encoding<float>(std::size_t, std::size_t);
template Tensor<double> positional_encoding<double>(std::size_t, std::size_t);
template struct Linear<float>;
template struct Linear<double>;
template struct LayerNormAffine<float>;
template struct LayerNormAffine<double>;
template AttentionResult<float> multi_head_attention<float>(const Tensor<float>&,
                                                            const AttentionParams<float>&,
                                                            bool);
template AttentionResult<double> multi_head_attention<double>(const Tensor<double>&,
                                                              const AttentionParams<double>&,
                                                              bool);
template class TransformerStack<float>;
template class TransformerStack<double>;

}  // namespace arionet::model
