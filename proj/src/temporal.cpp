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

#include "arionet/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "arionet/binary_io.hpp"
#include "arionet/encoder.hpp"
#include "arionet/errors.hpp"

namespace arionet::temporal {

void TemporalConfig::validate() const {
  if (blocks == 0 || heads == 0 || d_model == 0 || ffn_dim == 0) {
    throw ConfigError("temporal: all dimensions must be positive");
  }
  if (d_model % heads != 0) throw ConfigError("temporal: d_model must be divisible by heads");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("temporal: dropout must lie in [0, 1)");
  if (context == 0) throw ConfigError("temporal: context length t must be >= 1");
  if (horizon == 0) throw ConfigError("temporal: horizon k must be >= 1");
  if (horizon > context) throw ConfigError("temporal: horizon k must not exceed context t");
  if (!(lr > 0.0)) throw ConfigError("temporal: lr must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("temporal: gamma must lie in (0, 1]");
  if (batch == 0) throw ConfigError("temporal: batch must be positive");
  if (!(min_delta >= 0.0)) throw ConfigError("temporal: min_delta must be >= 0");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("temporal: val_fraction must lie in (0, 1)");
  }
}

std::pair<Chroma, Chroma> split_context_target(const Chroma& c, std::size_t t, std::size_t k) {
  if (c.cols() < t + k) {
    throw InvalidArgument("split_context_target: T=" + std::to_string(c.cols()) +
                          " is shorter than t+k (t=" + std::to_string(t) +
                          ", k=" + std::to_string(k) + ")");
  }
  Chroma ctx(c.rows(), t), tgt(c.rows(), k);
  for (std::size_t r = 0; r < c.rows(); ++r) {
    for (std::size_t j = 0; j < t; ++j) ctx(r, j) = c(r, j);
    for (std::size_t j = 0; j < k; ++j) tgt(r, j) = c(r, t + j);
  }
  return {std::move(ctx), std::move(tgt)};
}

template <typename T>
TemporalPredictor<T>::TemporalPredictor(const TemporalConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), dropout_rng_(seed ^ 0x9e3779b97f4a7c15ULL) {
  cfg_.validate();
  std::mt19937_64 rng(seed);
  input_ = model::Linear<T>("tmp.in", 12, cfg_.d_model, rng, params_);
  model::StackConfig sc{cfg_.blocks, cfg_.heads, cfg_.d_model, cfg_.ffn_dim, cfg_.dropout};
  stack_ = model::TransformerStack<T>("tmp", sc, rng, params_);
  head_ = model::Linear<T>("tmp.head", cfg_.d_model, 12, rng, params_);
}

template <typename T>
Tensor<T> TemporalPredictor<T>::predict(const Tensor<T>& context) {
  if (context.rank() != 2 || context.dim(0) != 12) {
    throw InvalidArgument("temporal: expected context [12, t], got " +
                          nn::shape_str(context.shape()));
  }
  const std::size_t t = context.dim(1);
  if (t == 0) throw InvalidArgument("temporal: empty context");
  if (t < cfg_.horizon) {
    throw InvalidArgument("temporal: context of " + std::to_string(t) +
                          " frames is shorter than horizon " + std::to_string(cfg_.horizon));
  }
  auto x = nn::add(input_(nn::transpose(context)),
                   model::positional_encoding<T>(t, cfg_.d_model));
  x = stack_.forward(x, training_, &dropout_rng_);
  const auto last = nn::slice(x, 0, t - cfg_.horizon, t);
  auto out = nn::transpose(head_(last));
  if (!training_) out = nn::clamp(out, T(0), T(1));
  return out;
}

template <typename T>
Tensor<T> TemporalPredictor<T>::predict(const Chroma& context) {
  return predict(model::to_tensor<T>(context));
}

template <typename T>
Tensor<T> mse(const Tensor<T>& pred, const Tensor<T>& target, std::size_t samples) {
  if (pred.shape() != target.shape()) {
    throw InvalidArgument("mse: incompatible shapes " + nn::shape_str(pred.shape()) + " and " +
                          nn::shape_str(target.shape()));
  }
  if (samples == 0) throw InvalidArgument("mse: samples must be positive");
  const auto diff = nn::sub(pred, target);
  return nn::mul_scalar(nn::sum(nn::mul(diff, diff)), T(1) / static_cast<T>(samples));
}

std::vector<TemporalSample> make_samples(const std::vector<Chroma>& chromas, std::size_t t,
                                         std::size_t k) {
  std::vector<TemporalSample> out;
  out.reserve(chromas.size());
  for (const auto& c : chromas) {
    auto [ctx, tgt] = split_context_target(c, t, k);
    out.push_back({std::move(ctx), std::move(tgt)});
  }
  return out;
}

namespace {

double frame_cosine(const Chroma& a, const Chroma& b, std::size_t col) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    dot += static_cast<double>(a(r, col)) * b(r, col);
    na += static_cast<double>(a(r, col)) * a(r, col);
    nb += static_cast<double>(b(r, col)) * b(r, col);
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

TemporalMetrics evaluate_temporal(TemporalPredictor<float>& model,
                                  const std::vector<TemporalSample>& samples) {
  TemporalMetrics m;
  if (samples.empty()) return m;
  const bool was_training = model.training();
  model.set_training(false);
  double sq = 0.0, abs_err = 0.0, cos = 0.0;
  std::size_t elems = 0, frames = 0;
  for (const auto& s : samples) {
    const auto p = model.predict(s.context);
    Chroma pred(s.target.rows(), s.target.cols(),
                std::vector<float>(p.data().begin(), p.data().end()));
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double d = static_cast<double>(pred.data()[i]) - s.target.data()[i];
      sq += d * d;
      abs_err += std::abs(d);
    }
    elems += pred.size();
    for (std::size_t c = 0; c < pred.cols(); ++c) cos += frame_cosine(pred, s.target, c);
    frames += pred.cols();
    m.predictions.push_back(std::move(pred));
  }
  model.set_training(was_training);
  m.mse = sq / static_cast<double>(samples.size());
  m.mae = abs_err / static_cast<double>(elems);
  m.cosine = cos / static_cast<double>(frames);
  return m;
}

TemporalResult train_temporal(const std::vector<Chroma>& chromas, const TemporalConfig& cfg,
                              const TemporalCallback& on_epoch) {
  cfg.validate();
  if (chromas.size() < 2) throw InvalidArgument("train_temporal: need at least 2 segments");
  const auto samples = make_samples(chromas, cfg.context, cfg.horizon);

  TemporalResult result{TemporalPredictor<float>(cfg, cfg.seed), {}, 0, false, {}, {}, {}};
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed ^ 0x8ebc6af09c88c6e3ULL);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(cfg.val_fraction * static_cast<double>(order.size()))),
      1, order.size() - 1);
  result.val_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  result.train_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

  std::vector<TemporalSample> val;
  for (auto i : result.val_indices) val.push_back(samples[i]);

  std::size_t batch = cfg.batch;
  const std::size_t n_train = result.train_indices.size();
  if (batch > n_train) {
    result.warnings.push_back("batch " + std::to_string(batch) + " exceeds training set size " +
                              std::to_string(n_train) + "; clamped");
    batch = n_train;
  }

  auto& model = result.model;
  nn::AdamOptions opts;
  opts.lr = cfg.lr;
  opts.gamma = cfg.gamma;
  nn::Adam<float> opt(nn::tensors_of(model.params()), opts);

  double best = std::numeric_limits<double>::infinity();
  auto best_params = nn::clone_params(model.params());
  std::size_t since_best = 0;
  auto train_order = result.train_indices;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    model.set_training(true);
    std::shuffle(train_order.begin(), train_order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n_train; start += batch) {
      const std::size_t bsz = std::min(batch, n_train - start);
      std::vector<Tensor<float>> preds, targets;
      for (std::size_t i = 0; i < bsz; ++i) {
        const auto& s = samples[train_order[start + i]];
        preds.push_back(model.predict(s.context));
        targets.push_back(model::to_tensor<float>(s.target));
      }
      const auto loss = mse(nn::concat(preds, 0), nn::concat(targets, 0), bsz);
      loss_sum += static_cast<double>(loss.item()) * static_cast<double>(bsz);
      nn::backward(loss);
      opt.step();
      opt.zero_grad();
    }
    opt.decay_lr();

    const auto vm = evaluate_temporal(model, val);
    TemporalEpoch rec{epoch, loss_sum / static_cast<double>(n_train), vm.mse, vm.cosine, vm.mae};
    result.trace.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (vm.mse < best - cfg.min_delta) {
      best = vm.mse;
      result.best_epoch = epoch;
      nn::copy_param_values(model.params(), best_params);
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      result.stopped_early = epoch < cfg.max_epochs;
      break;
    }
  }
  if (result.best_epoch > 0) nn::copy_param_values(best_params, model.params());
  model.set_training(false);
  return result;
}

TemporalResult train_temporal(const pipeline::FeatureStore& store, const TemporalConfig& cfg,
                              const TemporalCallback& on_epoch) {
  std::vector<Chroma> chromas;
  chromas.reserve(store.records.size());
  for (const auto& r : store.records) chromas.push_back(r.chroma);
  return train_temporal(chromas, cfg, on_epoch);
}

void write_temporal_trace(const std::filesystem::path& path,
                          const std::vector<TemporalEpoch>& trace) {
  std::ostringstream os;
  os.precision(9);
  os << "epoch,train_mse,val_mse,val_cosine,val_mae\n";
  for (const auto& e : trace) {
    os << e.epoch << ',' << e.train_mse << ',' << e.val_mse << ',' << e.val_cosine << ','
       << e.val_mae << '\n';
  }
  io::write_text_atomic(path, os.str());
}

template class TemporalPredictor<float>;
template class TemporalPredictor<double>;
template Tensor<float> mse<float>(const Tensor<float>&, const Tensor<float>&, std::size_t);
template Tensor<double> mse<double>(const Tensor<double>&, const Tensor<double>&, std::size_t);

}  // namespace arionet::temporal
