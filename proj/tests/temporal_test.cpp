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

#include <gtest/gtest.h>

#include <random>

#include "arionet/errors.hpp"
#include "arionet/encoder.hpp"
#include "arionet/temporal.hpp"
#include "test_util.hpp"

namespace {

using namespace arionet;
using temporal::TemporalConfig;

TemporalConfig tiny() {
  TemporalConfig c;
  c.blocks = 1;
  c.heads = 2;
  c.d_model = 8;
  c.ffn_dim = 16;
  c.context = 6;
  c.horizon = 2;
  return c;
}

TEST(Temporal, SplitContextTarget) {
  Matrix<float> c(12, 10);
  for (std::size_t t = 0; t < 10; ++t) c(0, t) = static_cast<float>(t);
  const auto [ctx, tgt] = temporal::split_context_target(c, 6, 3);
  EXPECT_EQ(ctx.cols(), 6u);
  EXPECT_EQ(tgt.cols(), 3u);
  EXPECT_EQ(ctx(0, 5), 5.0f);
  EXPECT_EQ(tgt(0, 0), 6.0f);
  EXPECT_EQ(tgt(0, 2), 8.0f);
  try {
    temporal::split_context_target(c, 8, 3);
    FAIL() << "expected an error";
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("10"), std::string::npos);
    EXPECT_NE(msg.find("8"), std::string::npos);
  }
}

TEST(Temporal, ConfigValidation) {
  auto c = tiny();
  c.horizon = 7;
  EXPECT_THROW(c.validate(), ConfigError);
  c = tiny();
  c.context = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = tiny();
  c.heads = 3;
  EXPECT_THROW(c.validate(), ConfigError);
  c = tiny();
  c.val_fraction = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_NO_THROW(TemporalConfig{}.validate());
}

TEST(Temporal, PredictShapeAndEvalClamp) {
  temporal::TemporalPredictor<float> m(tiny(), 3);
  std::mt19937_64 rng(1);
  auto ctx = testutil::random_chroma(6, rng);
  for (auto& v : ctx.data()) v *= 50.0f;
  const auto out = m.predict(ctx);
  EXPECT_EQ(out.shape(), (nn::Shape{12, 2}));
  for (float v : out.data()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
  EXPECT_THROW(m.predict(Matrix<float>(11, 6)), InvalidArgument);
  EXPECT_THROW(m.predict(Matrix<float>(12, 1)), InvalidArgument);
}

TEST(Temporal, MseMatchesDirectSum) {
  const auto p = nn::Tensor<double>::from_data({2, 2}, {1, 2, 3, 4});
  const auto t = nn::Tensor<double>::from_data({2, 2}, {0, 2, 5, 1});
  EXPECT_DOUBLE_EQ(temporal::mse(p, t).item(), 14.0);
  EXPECT_DOUBLE_EQ(temporal::mse(p, t, 2).item(), 7.0);
  EXPECT_THROW(temporal::mse(p, nn::Tensor<double>::zeros({4})), InvalidArgument);
}

TEST(Temporal, GradientsMatchFiniteDifferences) {
  temporal::TemporalPredictor<double> m(tiny(), 4);
  m.set_training(true);
  std::mt19937_64 rng(2);
  const auto ctx = model::to_tensor<double>(testutil::random_chroma(9, rng));
  const auto target = model::to_tensor<double>(testutil::random_chroma(2, rng));
  testutil::jitter_biases(m.params(), 3);
  auto loss = [&] { return temporal::mse(m.predict(ctx), target); };
  for (const auto& c : testutil::check_gradients(m.params(), loss, 4, 5)) {
    EXPECT_LT(c.max_rel_error, 1e-4) << c.name;
  }
}

std::vector<Matrix<float>> periodic_sequences(std::size_t n, std::size_t len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Matrix<float>> motifs;
  for (std::size_t p : {2u, 3u, 4u}) motifs.push_back(testutil::random_chroma(p, rng));
  std::vector<Matrix<float>> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = motifs[i % motifs.size()];
    const std::size_t phase = rng() % m.cols();
    Matrix<float> s(12, len);
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t r = 0; r < 12; ++r) s(r, t) = m(r, (t + phase) % m.cols());
    }
    out.push_back(std::move(s));
  }
  return out;
}

TEST(Temporal, TrainingReducesValidationErrorAndRestoresBest) {
  auto cfg = tiny();
  cfg.d_model = 16;
  cfg.lr = 3e-3;
  cfg.batch = 8;
  cfg.max_epochs = 40;
  cfg.patience = 5;
  cfg.seed = 7;
  const auto data = periodic_sequences(40, 8, 3);
  auto r = temporal::train_temporal(data, cfg);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_LT(r.trace.back().train_mse, r.trace.front().train_mse);
  EXPECT_EQ(r.val_indices.size(), 4u);
  EXPECT_EQ(r.train_indices.size(), 36u);

  std::size_t best = 0;
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    if (r.trace[i].val_mse < r.trace[best].val_mse) best = i;
  }
  std::vector<temporal::TemporalSample> val;
  const auto samples = temporal::make_samples(data, cfg.context, cfg.horizon);
  for (auto i : r.val_indices) val.push_back(samples[i]);
  const auto m = temporal::evaluate_temporal(r.model, val);
  EXPECT_NEAR(m.mse, r.trace[r.best_epoch - 1].val_mse, 1e-9);
  EXPECT_LE(r.trace[r.best_epoch - 1].val_mse, r.trace[best].val_mse + cfg.min_delta);
}

TEST(Temporal, EarlyStoppingHonoursPatience) {
  auto cfg = tiny();
  cfg.lr = 1e-9;
  cfg.max_epochs = 50;
  cfg.patience = 3;
  cfg.min_delta = 1.0;
  const auto r = temporal::train_temporal(periodic_sequences(12, 8, 1), cfg);
  EXPECT_TRUE(r.stopped_early);
  EXPECT_EQ(r.best_epoch, 1u);
  EXPECT_EQ(r.trace.size(), 4u);
}

TEST(Temporal, DeterministicForSeed) {
  auto cfg = tiny();
  cfg.max_epochs = 3;
  cfg.seed = 11;
  const auto data = periodic_sequences(20, 8, 2);
  const auto a = temporal::train_temporal(data, cfg);
  const auto b = temporal::train_temporal(data, cfg);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].val_mse, b.trace[i].val_mse);
  }
  EXPECT_EQ(a.val_indices, b.val_indices);
}

TEST(Temporal, RejectsTooFewOrTooShortSequences) {
  const auto cfg = tiny();
  EXPECT_THROW(temporal::train_temporal(periodic_sequences(1, 8, 1), cfg), InvalidArgument);
  EXPECT_THROW(temporal::train_temporal(periodic_sequences(5, 7, 1), cfg), InvalidArgument);
}

TEST(Temporal, EvaluateCosineTreatsZeroFramesAsZero) {
  temporal::TemporalPredictor<float> m(tiny(), 3);
  temporal::TemporalSample s{Matrix<float>(12, 6, 0.5f), Matrix<float>(12, 2, 0.0f)};
  const auto r = temporal::evaluate_temporal(m, {s});
  EXPECT_EQ(r.cosine, 0.0);
  double mae = 0.0;
  for (float v : r.predictions[0].data()) mae += v;
  EXPECT_NEAR(r.mae, mae / 24.0, 1e-9);
}

TEST(Temporal, TraceCsv) {
  testutil::TempDir dir("trace");
  temporal::write_temporal_trace(dir / "t.csv", {{1, 0.5, 0.25, 0.75, 0.125}});
  const auto b = testutil::file_bytes(dir / "t.csv");
  EXPECT_EQ(std::string(b.begin(), b.end()),
            "epoch,train_mse,val_mse,val_cosine,val_mae\n1,0.5,0.25,0.75,0.125\n");
}

}  // namespace
