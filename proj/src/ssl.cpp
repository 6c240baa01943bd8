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

#include "arionet/ssl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "arionet/binary_io.hpp"
#include "arionet/errors.hpp"

namespace arionet::ssl {

namespace {

std::atomic<std::uint64_t> g_renormalized{0};

constexpr double kUnitTolerance = 1e-6;

template <typename T>
bool rows_are_unit(const Tensor<T>& z) {
  const std::size_t n = z.dim(0), d = z.dim(1);
  const auto v = z.data();
  for (std::size_t r = 0; r < n; ++r) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) sq += static_cast<double>(v[r * d + j]) * v[r * d + j];
    if (std::abs(std::sqrt(sq) - 1.0) > kUnitTolerance) return false;
  }
  return true;
}

template <typename T>
double row_dot(std::span<const T> a, std::span<const T> b, std::size_t ra, std::size_t rb,
               std::size_t d) {
  double acc = 0.0;
  for (std::size_t j = 0; j < d; ++j) acc += static_cast<double>(a[ra * d + j]) * b[rb * d + j];
  return acc;
}

}  // namespace

AugmentationSpec AugmentationSpec::none() {
  AugmentationSpec s;
  s.pitch_shift = s.time_mask = s.chroma_mask = false;
  return s;
}

void AugmentationSpec::validate() const {
  if (pitch_shift_range < 0) throw ConfigError("pitch_shift_range must be >= 0");
  if (!(time_mask_max >= 0.0 && time_mask_max <= 1.0)) {
    throw ConfigError("time_mask_max must lie in [0, 1]");
  }
  if (chroma_mask_max_rows < 0 || chroma_mask_max_rows > 12) {
    throw ConfigError("chroma_mask_max_rows must lie in [0, 12]");
  }
}

Chroma pitch_shift(const Chroma& c, int k) {
  const int rows = static_cast<int>(c.rows());
  if (rows == 0) return c;
  Chroma out(c.rows(), c.cols());
  const int shift = ((k % rows) + rows) % rows;
  for (int p = 0; p < rows; ++p) {
    const auto src = c.row(static_cast<std::size_t>(p));
    auto dst = out.row(static_cast<std::size_t>((p + shift) % rows));
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

Chroma time_mask(const Chroma& c, std::size_t width, std::size_t start) {
  if (start + width > c.cols()) {
    throw InvalidArgument("time_mask: columns [" + std::to_string(start) + ", " +
                          std::to_string(start + width) + ") exceed T=" +
                          std::to_string(c.cols()));
  }
  Chroma out = c;
  for (std::size_t r = 0; r < c.rows(); ++r) {
    for (std::size_t t = start; t < start + width; ++t) out(r, t) = 0.0f;
  }
  return out;
}

Chroma chroma_mask(const Chroma& c, const std::vector<std::size_t>& rows) {
  Chroma out = c;
  for (auto r : rows) {
    if (r >= c.rows()) {
      throw InvalidArgument("chroma_mask: row " + std::to_string(r) + " out of range");
    }
    auto row = out.row(r);
    std::fill(row.begin(), row.end(), 0.0f);
  }
  return out;
}

Chroma augment(const Chroma& c, const AugmentationSpec& spec, std::mt19937_64& rng) {
  Chroma out = c;
  if (spec.pitch_shift) {
    std::uniform_int_distribution<int> k(-spec.pitch_shift_range, spec.pitch_shift_range);
    out = pitch_shift(out, k(rng));
  }
  if (spec.chroma_mask) {
    std::uniform_int_distribution<int> count(0, spec.chroma_mask_max_rows);
    const auto n = static_cast<std::size_t>(count(rng));
    std::vector<std::size_t> all(out.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::min(n, all.size()));
    out = chroma_mask(out, all);
  }
  if (spec.time_mask) {
    const auto max_w = static_cast<std::size_t>(
        std::floor(spec.time_mask_max * static_cast<double>(out.cols())));
    std::uniform_int_distribution<std::size_t> width(0, max_w);
    const std::size_t w = width(rng);
    std::uniform_int_distribution<std::size_t> start(0, out.cols() - w);
    out = time_mask(out, w, start(rng));
  }
  return out;
}

std::pair<Chroma, Chroma> make_views(const Chroma& c, const AugmentationSpec& spec,
                                     std::mt19937_64& rng) {
  auto a = augment(c, spec, rng);
  auto b = augment(c, spec, rng);
  return {std::move(a), std::move(b)};
}

std::uint64_t renormalization_warnings() { return g_renormalized.load(); }
void reset_renormalization_warnings() { g_renormalized.store(0); }

template <typename T>
Tensor<T> nt_xent(const Tensor<T>& za, const Tensor<T>& zb, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("nt_xent: temperature must be positive");
  if (za.rank() != 2 || za.shape() != zb.shape()) {
    throw InvalidArgument("nt_xent: incompatible shapes " + nn::shape_str(za.shape()) +
                          " and " + nn::shape_str(zb.shape()));
  }
  const std::size_t b = za.dim(0), d = za.dim(1);
  if (b == 0) throw InvalidArgument("nt_xent: empty batch");

  auto z = nn::concat<T>({za, zb}, 0);
  if (!rows_are_unit(z)) {
    ++g_renormalized;
    z = nn::l2_normalize(z);
  }

  const std::size_t n = 2 * b;
  const auto zv = z.data();
  std::vector<double> s(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t m = r; m < n; ++m) {
      s[r * n + m] = s[m * n + r] = row_dot<T>(zv, zv, r, m, d) / tau;
    }
  }

  // Row r's positive is its partner view; the denominator runs over m != r.
  std::vector<double> prob(n * n, 0.0);
  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t pos = (r + b) % n;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < n; ++m) {
      if (m != r) mx = std::max(mx, s[r * n + m]);
    }
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      if (m != r) acc += std::exp(s[r * n + m] - mx);
    }
    const double lse = mx + std::log(acc);
    loss += lse - s[r * n + pos];
    for (std::size_t m = 0; m < n; ++m) {
      if (m != r) prob[r * n + m] = std::exp(s[r * n + m] - lse);
    }
  }
  loss /= static_cast<double>(n);

  return nn::make_result<T>({}, {static_cast<T>(loss)}, {z},
                        [prob = std::move(prob), n, b, d, tau](nn::Node<T>& self) {
                          nn::Node<T>& nz = *self.parents[0];
                          const double g = static_cast<double>(self.grad[0]);
                          std::vector<double> sym(n * n);
                          for (std::size_t r = 0; r < n; ++r) {
                            for (std::size_t m = 0; m < n; ++m) {
                              const double grm = prob[r * n + m] - (m == (r + b) % n ? 1.0 : 0.0);
                              const double gmr = prob[m * n + r] - (r == (m + b) % n ? 1.0 : 0.0);
                              sym[r * n + m] =
                                  r == m ? 0.0 : (grm + gmr) * g / (static_cast<double>(n) * tau);
                            }
                          }
                          auto& gz = nz.ensure_grad();
                          for (std::size_t r = 0; r < n; ++r) {
                            for (std::size_t m = 0; m < n; ++m) {
                              const double w = sym[r * n + m];
                              if (w == 0.0) continue;
                              for (std::size_t j = 0; j < d; ++j) {
                                gz[r * d + j] += static_cast<T>(w * nz.value[m * d + j]);
                              }
                            }
                          }
                        });
}

void PretrainConfig::validate() const {
  encoder.validate();
  augment.validate();
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  if (!(adam.lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(adam.gamma > 0.0 && adam.gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (batch < 2) throw ConfigError("batch must be at least 2");
}

PretrainResult pretrain(const std::vector<Chroma>& chromas, const PretrainConfig& cfg,
                        const EpochCallback& on_epoch) {
  cfg.validate();
  if (chromas.empty()) throw InvalidArgument("pretrain: empty dataset");

  PretrainResult result{model::ChromaEncoder<float>(cfg.encoder, cfg.seed), {}, {}, cfg.batch,
                        {}};
  const std::size_t n = chromas.size();
  if (result.batch > n) {
    result.warnings.push_back("batch " + std::to_string(cfg.batch) + " exceeds dataset size " +
                              std::to_string(n) + "; clamped");
    result.batch = n;
  }

  auto& enc = result.encoder;
  nn::Adam<float> opt(nn::tensors_of(enc.params()), cfg.adam);
  std::mt19937_64 shuffle_rng(cfg.seed ^ 0xa0761d6478bd642fULL);
  std::mt19937_64 aug_rng(cfg.augment.seed ^ (cfg.seed * 0xe7037ed1a0b428dbULL));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  enc.set_training(true);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0, cos_sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t start = 0; start < n; start += result.batch) {
      const std::size_t bsz = std::min(result.batch, n - start);
      if (bsz < 2 && n > 1) continue;  // a lone item has no negatives
      std::vector<Tensor<float>> ua, ub;
      for (std::size_t i = 0; i < bsz; ++i) {
        auto [va, vb] = make_views(chromas[order[start + i]], cfg.augment, aug_rng);
        ua.push_back(enc.forward(va).u_unit);
        ub.push_back(enc.forward(vb).u_unit);
      }
      const auto za = nn::concat(ua, 0);
      const auto zb = nn::concat(ub, 0);
      const auto loss = nt_xent(za, zb, cfg.temperature);

      const std::size_t d = za.dim(1);
      for (std::size_t i = 0; i < bsz; ++i) {
        cos_sum += row_dot<float>(za.data(), zb.data(), i, i, d);
      }
      loss_sum += static_cast<double>(loss.item()) * static_cast<double>(bsz);
      counted += bsz;

      if (bsz >= 2) {
        nn::backward(loss);
        opt.step();
        opt.zero_grad();
      }
    }
    opt.decay_lr();
    const double mean_loss = counted ? loss_sum / static_cast<double>(counted) : 0.0;
    const double mean_cos = counted ? cos_sum / static_cast<double>(counted) : 0.0;
    result.loss_trace.push_back(mean_loss);
    result.positive_cosine.push_back(mean_cos);
    if (on_epoch) on_epoch(epoch + 1, mean_loss, mean_cos);
  }
  enc.set_training(false);
  return result;
}

PretrainResult pretrain(const pipeline::FeatureStore& store, const PretrainConfig& cfg,
                        const EpochCallback& on_epoch) {
  std::vector<Chroma> chromas;
  chromas.reserve(store.records.size());
  for (const auto& r : store.records) chromas.push_back(r.chroma);
  return pretrain(chromas, cfg, on_epoch);
}

ContrastiveProbe contrastive_probe(model::ChromaEncoder<float>& encoder,
                                   const std::vector<Chroma>& chromas,
                                   const AugmentationSpec& spec, double tau, std::size_t batch) {
  if (chromas.size() < 2) throw InvalidArgument("contrastive_probe: need at least 2 items");
  if (batch < 2) throw InvalidArgument("contrastive_probe: batch must be >= 2");
  const bool was_training = encoder.training();
  encoder.set_training(false);
  std::mt19937_64 rng(spec.seed);
  const std::size_t n = chromas.size();
  batch = std::min(batch, n);
  double loss_sum = 0.0, cos_sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t start = 0; start < n; start += batch) {
    const std::size_t bsz = std::min(batch, n - start);
    if (bsz < 2) continue;
    std::vector<Tensor<float>> ua, ub;
    for (std::size_t i = 0; i < bsz; ++i) {
      auto [va, vb] = make_views(chromas[start + i], spec, rng);
      ua.push_back(encoder.forward(va).u_unit.detach());
      ub.push_back(encoder.forward(vb).u_unit.detach());
    }
    const auto za = nn::concat(ua, 0);
    const auto zb = nn::concat(ub, 0);
    loss_sum += static_cast<double>(nt_xent(za, zb, tau).item()) * static_cast<double>(bsz);
    for (std::size_t i = 0; i < bsz; ++i) {
      cos_sum += row_dot<float>(za.data(), zb.data(), i, i, za.dim(1));
    }
    counted += bsz;
  }
  encoder.set_training(was_training);
  return {loss_sum / static_cast<double>(counted), cos_sum / static_cast<double>(counted)};
}

void write_loss_trace(const std::filesystem::path& path, const std::vector<double>& losses) {
  std::ostringstream os;
  os.precision(9);
  os << "epoch,mean_loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i) os << (i + 1) << ',' << losses[i] << '\n';
  io::write_text_atomic(path, os.str());
}

template Tensor<float> nt_xent<float>(const Tensor<float>&, const Tensor<float>&, double);
template Tensor<double> nt_xent<double>(const Tensor<double>&, const Tensor<double>&, double);

}  // namespace arionet::ssl
