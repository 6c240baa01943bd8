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

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "arionet/errors.hpp"
#include "arionet/eval.hpp"
#include "metric_oracle.hpp"
#include "test_util.hpp"

namespace {

using namespace arionet;
using eval::Label;

// Gaussian blobs, one per class, in `dim` dimensions.
void blobs(std::size_t per_class, std::size_t classes, std::size_t dim, double spread,
           std::uint64_t seed, Matrix<float>& x, std::vector<Label>& y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, spread);
  x = Matrix<float>(per_class * classes, dim);
  y.clear();
  for (std::size_t i = 0; i < per_class * classes; ++i) {
    const Label c = static_cast<Label>(i % classes);
    for (std::size_t d = 0; d < dim; ++d) {
      x(i, d) = static_cast<float>((d % classes == c ? 3.0 : 0.0) + g(rng));
    }
    y.push_back(c);
  }
}

TEST(Metrics, HandBinaryCase) {
  eval::ConfusionMatrix cm(2);
  cm.add(0, 0, 5);
  cm.add(0, 1, 1);
  cm.add(1, 0, 2);
  cm.add(1, 1, 4);
  const auto r = eval::metrics(cm);
  EXPECT_DOUBLE_EQ(r.accuracy, 9.0 / 12.0);
  EXPECT_DOUBLE_EQ(r.per_class[0].precision, 5.0 / 7.0);
  EXPECT_DOUBLE_EQ(r.per_class[0].recall, 5.0 / 6.0);
  EXPECT_NEAR(r.per_class[0].mcc, (5.0 * 4 - 1.0 * 2) / std::sqrt(7.0 * 6 * 5 * 6), 1e-15);
  EXPECT_NEAR(r.per_class[1].mcc, r.per_class[0].mcc, 1e-15);
  EXPECT_DOUBLE_EQ(r.label_mae, 3.0 / 12.0);
  const double pe = (6.0 * 7 + 6.0 * 5) / 144.0;
  EXPECT_NEAR(r.kappa, (0.75 - pe) / (1 - pe), 1e-15);
}

TEST(Metrics, MatchesOracleOnRandomMatrices) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto cm = testutil::random_confusion(2 + trial % 9, rng, 6);
    const auto got = eval::metrics(cm);
    EXPECT_LT(testutil::max_report_error(got, testutil::oracle_metrics(cm)), 1e-12);
  }
}

TEST(Metrics, ComplementIdentitiesAndRanges) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = eval::metrics(testutil::random_confusion(3 + trial % 5, rng, 4));
    for (const auto& m : r.per_class) {
      for (double v : {m.precision, m.recall, m.f1, m.specificity, m.npv}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
      EXPECT_EQ(m.fpr + m.specificity, 1.0);
      EXPECT_EQ(m.fdr + m.precision, 1.0);
      EXPECT_EQ(m.fnr + m.recall, 1.0);
    }
  }
}

TEST(Metrics, PerfectDiagonal) {
  eval::ConfusionMatrix cm(4);
  for (Label k = 0; k < 4; ++k) cm.add(k, k, 3 + k);
  const auto r = eval::metrics(cm);
  EXPECT_DOUBLE_EQ(r.mcc, 1.0);
  EXPECT_DOUBLE_EQ(r.kappa, 1.0);
  EXPECT_DOUBLE_EQ(r.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(r.label_mae, 0.0);
}

TEST(Metrics, KappaIsOneOnlyForDiagonal) {
  eval::ConfusionMatrix single(3);
  single.add(1, 1, 10);
  EXPECT_DOUBLE_EQ(eval::metrics(single).kappa, 1.0);
  eval::ConfusionMatrix off(3);
  off.add(1, 1, 10);
  off.add(0, 1, 1);
  EXPECT_LT(eval::metrics(off).kappa, 1.0);
}

TEST(Metrics, EmptyMatrixIsAnError) {
  EXPECT_THROW(eval::metrics(eval::ConfusionMatrix(3)), InvalidArgument);
  EXPECT_THROW(eval::metrics(eval::ConfusionMatrix(0)), InvalidArgument);
}

TEST(Metrics, FromLabels) {
  const std::vector<Label> t{0, 1, 2, 2}, p{0, 2, 2, 1};
  const auto cm = eval::ConfusionMatrix::from_labels(t, p, 3);
  EXPECT_EQ(cm.at(2, 2), 1u);
  EXPECT_EQ(cm.at(1, 2), 1u);
  EXPECT_EQ(cm.total(), 4u);
  const std::vector<Label> bad{5};
  EXPECT_THROW(eval::ConfusionMatrix::from_labels(bad, bad, 3), InvalidArgument);
}

TEST(Metrics, ReportCsvLayout) {
  eval::ConfusionMatrix cm(2);
  cm.add(0, 0, 1);
  cm.add(1, 1, 1);
  const auto csv = eval::report_csv(eval::metrics(cm), {"a", "b"});
  EXPECT_EQ(csv.rfind("metric,value\naccuracy,1\nprecision,1\n", 0), 0u);
  EXPECT_NE(csv.find("\nkappa,1\nlabel_mae,0\n"), std::string::npos);
  EXPECT_NE(csv.find("\nmcc[b],1\n"), std::string::npos);
  const auto table = eval::report_table(eval::metrics(cm), {"a", "b"});
  EXPECT_NE(table.find("accuracy"), std::string::npos);
}

TEST(Forest, SeparatesBlobs) {
  Matrix<float> x, xt;
  std::vector<Label> y, yt;
  blobs(30, 3, 6, 0.5, 1, x, y);
  blobs(10, 3, 6, 0.5, 2, xt, yt);
  eval::ForestOptions o;
  o.trees = 25;
  o.seed = 3;
  const auto f = eval::fit_forest(x, y, o);
  EXPECT_EQ(f.trees.size(), 25u);
  const auto pred = f.predict(xt);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < yt.size(); ++i) ok += pred[i] == yt[i];
  EXPECT_GE(ok, 29u);
}

TEST(Forest, SingleTreeFitsTrainingSetOfDistinctPoints) {
  Matrix<float> x(6, 1, std::vector<float>{0, 1, 2, 3, 4, 5});
  const std::vector<Label> y{0, 0, 1, 1, 0, 2};
  eval::ForestOptions o;
  o.trees = 1;
  const auto f = eval::fit_forest(x, y, o);
  for (const auto& n : f.trees[0].nodes) {
    if (n.feature >= 0) {
      // Midpoints between adjacent distinct values.
      EXPECT_EQ(n.threshold - std::floor(n.threshold), 0.5f);
    }
  }
}

TEST(Forest, DeterministicAndRelabelInvariant) {
  Matrix<float> x, xt;
  std::vector<Label> y, yt;
  blobs(20, 4, 5, 1.2, 4, x, y);
  blobs(10, 4, 5, 1.2, 5, xt, yt);
  eval::ForestOptions o;
  o.trees = 15;
  o.seed = 9;
  const auto a = eval::fit_forest(x, y, o).predict(xt);
  EXPECT_EQ(a, eval::fit_forest(x, y, o).predict(xt));

  const std::vector<Label> perm{2, 0, 3, 1};
  std::vector<Label> y2;
  for (Label l : y) y2.push_back(perm[l]);
  const auto forest = eval::fit_forest(x, y, o);
  const auto b = eval::fit_forest(x, y2, o).predict(xt);
  // Smallest-id tie-breaking cannot commute with relabeling, so tied votes are skipped.
  std::size_t compared = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<std::size_t> votes(4, 0);
    for (const auto& t : forest.trees) ++votes[t.predict(xt.row(i))];
    const auto top = *std::max_element(votes.begin(), votes.end());
    if (std::count(votes.begin(), votes.end(), top) > 1) continue;
    ++compared;
    EXPECT_EQ(perm[a[i]], b[i]) << "row " << i;
  }
  EXPECT_GE(compared, a.size() / 2);
}

TEST(Forest, RejectsSingleClass) {
  Matrix<float> x(4, 2, 1.0f);
  const std::vector<Label> y(4, 1);
  EXPECT_THROW(eval::fit_forest(x, y), InvalidArgument);
}

TEST(Knn, HandCaseAndTieBreak) {
  Matrix<float> x(4, 1, std::vector<float>{0, 1, 10, 11});
  const std::vector<Label> y{1, 1, 0, 0};
  const std::vector<float> q1{0.4f}, q2{10.6f};
  EXPECT_EQ(eval::knn_predict(x, y, q1, 1), 1u);
  EXPECT_EQ(eval::knn_predict(x, y, q2, 3), 0u);
  // k clamped to N = 4 gives a 2-2 tie, resolved to the smallest id.
  EXPECT_EQ(eval::knn_predict(x, y, q1, 50), 0u);
  EXPECT_THROW(eval::knn_predict(x, y, q1, 0), InvalidArgument);
}

TEST(Knn, RelabelInvariant) {
  Matrix<float> x, xt;
  std::vector<Label> y, yt;
  // Two classes and odd k rule out vote ties.
  blobs(15, 2, 4, 1.5, 6, x, y);
  blobs(10, 2, 4, 1.5, 7, xt, yt);
  const std::vector<Label> perm{1, 0};
  std::vector<Label> y2;
  for (Label l : y) y2.push_back(perm[l]);
  for (std::size_t i = 0; i < xt.rows(); ++i) {
    const auto a = eval::knn_predict(x, y, xt.row(i), 5);
    const auto b = eval::knn_predict(x, y2, xt.row(i), 5);
    EXPECT_EQ(perm[a], b);
  }
}

eval::Classifier make_forest_classifier() {
  Matrix<float> x;
  std::vector<Label> y;
  blobs(10, 3, 4, 0.8, 8, x, y);
  eval::Classifier c;
  c.kind = eval::ClassifierKind::kForest;
  c.class_names = {"alpha", "beta", "gamma"};
  c.split_seed = 77;
  c.test_fraction = 0.25;
  eval::ForestOptions o;
  o.trees = 5;
  c.forest = eval::fit_forest(x, y, o);
  return c;
}

TEST(ClassifierFile, ForestRoundTrip) {
  const auto c = make_forest_classifier();
  const auto bytes = eval::encode_classifier(c);
  const auto d = eval::decode_classifier(bytes);
  EXPECT_EQ(d.class_names, c.class_names);
  EXPECT_EQ(d.split_seed, 77u);
  EXPECT_EQ(d.test_fraction, 0.25);
  EXPECT_EQ(eval::encode_classifier(d), bytes);
  Matrix<float> x;
  std::vector<Label> y;
  blobs(5, 3, 4, 0.8, 9, x, y);
  EXPECT_EQ(d.predict(x), c.predict(x));
}

TEST(ClassifierFile, KnnRoundTrip) {
  eval::Classifier c;
  c.kind = eval::ClassifierKind::kKnn;
  c.class_names = {"a", "b"};
  c.k = 3;
  c.train_x = Matrix<float>(3, 2, std::vector<float>{0, 0, 1, 1, 5, 5});
  c.train_y = {0, 0, 1};
  const auto d = eval::decode_classifier(eval::encode_classifier(c));
  EXPECT_EQ(d.k, 3u);
  EXPECT_EQ(d.train_x, c.train_x);
  EXPECT_EQ(d.train_y, c.train_y);
}

TEST(ClassifierFile, CorruptionRaisesTypedErrors) {
  const auto good = eval::encode_classifier(make_forest_classifier());
  auto bad_magic = good;
  bad_magic[0] = 'X';
  try {
    eval::decode_classifier(bad_magic);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatError::Kind::kBadMagic);
  }
  auto bad_version = good;
  bad_version[4] = 9;
  try {
    eval::decode_classifier(bad_version);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatError::Kind::kUnsupportedVersion);
  }
  for (std::size_t cut : {std::size_t{6}, std::size_t{20}, good.size() - 1}) {
    std::vector<std::uint8_t> trunc(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut));
    try {
      eval::decode_classifier(trunc);
      FAIL() << cut;
    } catch (const FormatError& e) {
      EXPECT_EQ(e.kind(), FormatError::Kind::kTruncated) << cut;
    }
  }
  auto trailing = good;
  trailing.push_back(0);
  EXPECT_THROW(eval::decode_classifier(trailing), FormatError);
}

TEST(ClassifierFile, ChildIndexCycleIsRejected) {
  auto c = make_forest_classifier();
  auto& nodes = c.forest.trees[0].nodes;
  ASSERT_GT(nodes.size(), 1u);
  nodes[0].left = 0;
  try {
    eval::decode_classifier(eval::encode_classifier(c));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatError::Kind::kInvalidRecord);
  }
}

TEST(Split, StratifiedAndDeterministic) {
  std::vector<Label> labels;
  for (int i = 0; i < 50; ++i) labels.push_back(i % 5 == 0 ? 1 : 0);
  labels.push_back(2);
  const auto s = eval::stratified_split(labels, 0.2, 4);
  EXPECT_EQ(s.train.size() + s.test.size(), labels.size());
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  for (auto i : s.test) EXPECT_TRUE(all.insert(i).second);
  std::size_t test0 = 0, test1 = 0, test2 = 0;
  for (auto i : s.test) {
    test0 += labels[i] == 0;
    test1 += labels[i] == 1;
    test2 += labels[i] == 2;
  }
  EXPECT_EQ(test0, 8u);
  EXPECT_EQ(test1, 2u);
  EXPECT_EQ(test2, 0u);
  EXPECT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
  const auto again = eval::stratified_split(labels, 0.2, 4);
  EXPECT_EQ(again.test, s.test);
  EXPECT_NE(eval::stratified_split(labels, 0.2, 5).test, s.test);
  EXPECT_THROW(eval::stratified_split(labels, 1.0, 1), InvalidArgument);
}

TEST(Similarity, CosineAndCorrelation) {
  const std::vector<float> a{1, 2, 3}, b{2, 4, 6}, z{0, 0, 0};
  EXPECT_NEAR(eval::cosine_similarity(a, b), 1.0, 1e-12);
  EXPECT_EQ(eval::cosine_similarity(a, z), 0.0);

  std::mt19937_64 rng(10);
  std::normal_distribution<float> g;
  std::vector<float> o(12), p(12), neg(12);
  for (std::size_t i = 0; i < 12; ++i) {
    o[i] = g(rng);
    p[i] = o[i] + 0.3f * g(rng);
    neg[i] = 2.0f - o[i];
  }
  EXPECT_NEAR(eval::pitch_class_correlation(o, o), 1.0, 1e-12);
  EXPECT_NEAR(eval::pitch_class_correlation(o, neg), -1.0, 1e-12);
  double mo = 0, mp = 0;
  for (std::size_t i = 0; i < 12; ++i) {
    mo += o[i] / 12.0;
    mp += p[i] / 12.0;
  }
  double cov = 0, vo = 0, vp = 0;
  for (std::size_t i = 0; i < 12; ++i) {
    cov += (o[i] - mo) * (p[i] - mp);
    vo += (o[i] - mo) * (o[i] - mo);
    vp += (p[i] - mp) * (p[i] - mp);
  }
  EXPECT_NEAR(eval::pitch_class_correlation(o, p), cov / std::sqrt(vo * vp), 1e-12);
  const std::vector<float> flat(12, 0.5f);
  EXPECT_THROW(eval::pitch_class_correlation(flat, o), InvalidArgument);
}

TEST(FrameStats, HandCase) {
  Matrix<float> o(12, 2, 0.0f), p(12, 2, 0.0f);
  o(0, 0) = 1.0f;  // frame mean 1/12, max 1
  o(0, 1) = 1.0f;
  o(1, 1) = 1.0f;  // frame mean 2/12, max 1
  p(0, 0) = 0.5f;
  p(0, 1) = 0.5f;
  p(1, 1) = 1.0f;
  const auto r = eval::frame_distribution_stats({o}, {p});
  EXPECT_NEAR(r.orig_mean.mean, 1.5 / 12, 1e-12);
  EXPECT_NEAR(r.orig_mean.std, 0.5 / 12, 1e-12);
  EXPECT_NEAR(r.pred_mean.mean, 1.0 / 12, 1e-12);
  EXPECT_NEAR(r.orig_max.mean, 1.0, 1e-12);
  EXPECT_NEAR(r.pred_max.mean, 0.75, 1e-12);
  EXPECT_NEAR(r.mean_delta_pct, 100.0 / 3.0, 1e-9);
  EXPECT_NEAR(r.max_delta_pct, 25.0, 1e-9);
  EXPECT_NEAR(r.std_delta_pct, 0.0, 1e-9);
  EXPECT_THROW(eval::frame_distribution_stats({o}, {}), InvalidArgument);
}

}  // namespace
