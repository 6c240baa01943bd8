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

// Downstream evaluation: frozen embeddings, random forest and k-NN
// classifiers, the confusion-matrix metric suite, and frame statistics.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "arionet/encoder.hpp"
#include "arionet/matrix.hpp"
#include "arionet/pipeline.hpp"

namespace arionet::eval {

using Label = std::uint32_t;

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = 0);
  static ConfusionMatrix from_labels(std::span<const Label> truth, std::span<const Label> pred,
                                     std::size_t classes);

  void add(Label truth, Label pred, std::uint64_t count = 1);
  std::uint64_t at(std::size_t truth, std::size_t pred) const {
    return counts_[truth * classes_ + pred];
  }
  std::size_t classes() const { return classes_; }
  std::uint64_t total() const;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> counts_;
};

struct ClassMetrics {
  std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
  double precision = 0, recall = 0, f1 = 0, specificity = 0, npv = 0;
  double fpr = 0, fdr = 0, fnr = 0, mcc = 0;
};

/// Rates are one-vs-rest per class and averaged without support weighting.
/// A rate whose denominator is zero is 0; its complement is then 1.
/// label_mae is the mean |true id - predicted id|.
struct EvalReport {
  double accuracy = 0;
  double precision = 0, recall = 0, f1 = 0, specificity = 0, npv = 0;
  double fpr = 0, fdr = 0, fnr = 0;
  double mcc = 0, kappa = 0, label_mae = 0;
  std::vector<ClassMetrics> per_class;
};

/// Throws InvalidArgument on an empty matrix.
EvalReport metrics(const ConfusionMatrix& cm);

/// `metric,value` rows: macro metrics, then `<metric>[<class>]` per class.
std::string report_csv(const EvalReport& report, const std::vector<std::string>& class_names);
void write_report_csv(const std::filesystem::path& path, const EvalReport& report,
                      const std::vector<std::string>& class_names);
std::string report_table(const EvalReport& report, const std::vector<std::string>& class_names);

// ---- classifiers ------------------------------------------------------------

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  float threshold = 0.0f;     // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t label = 0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  Label predict(std::span<const float> x) const;
  std::size_t depth() const;
};

struct ForestOptions {
  std::size_t trees = 100;
  std::size_t max_features = 0;  // 0 selects floor(sqrt(d)), at least 1
  std::size_t max_depth = 0;     // 0 is unlimited
  std::uint64_t seed = 0;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  std::size_t classes = 0;
  std::size_t features = 0;

  Label predict(std::span<const float> x) const;
  std::vector<Label> predict(const Matrix<float>& x) const;
};

/// Bootstrap Gini trees. Throws unless y has at least two distinct labels.
ForestModel fit_forest(const Matrix<float>& x, std::span<const Label> y,
                       const ForestOptions& opts = {});

/// Euclidean k-NN vote; ties go to the smallest id. k is clamped to N.
Label knn_predict(const Matrix<float>& train_x, std::span<const Label> train_y,
                  std::span<const float> query, std::size_t k = 5);

enum class ClassifierKind : std::uint8_t { kForest = 0, kKnn = 1 };

struct Classifier {
  ClassifierKind kind = ClassifierKind::kForest;
  std::vector<std::string> class_names;
  // Split used at training time.
  std::uint64_t split_seed = 0;
  double test_fraction = 0.2;
  ForestModel forest;
  std::size_t k = 5;
  Matrix<float> train_x;
  std::vector<Label> train_y;

  std::vector<Label> predict(const Matrix<float>& x) const;
};

inline constexpr char kClassifierMagic[4] = {'A', 'R', 'C', 'L'};
inline constexpr std::uint32_t kClassifierVersion = 1;

std::vector<std::uint8_t> encode_classifier(const Classifier& c);
Classifier decode_classifier(std::vector<std::uint8_t> bytes);
void write_classifier(const std::filesystem::path& path, const Classifier& c);
Classifier read_classifier(const std::filesystem::path& path);

// ---- embeddings and splits ---------------------------------------------------

struct EmbeddingTable {
  Matrix<float> values;  // N x d'
  std::vector<Label> labels;
  std::vector<std::uint32_t> segment_ids;
};

/// Eval-mode unit embeddings of every stored chromagram.
EmbeddingTable embed_all(const pipeline::FeatureStore& store,
                         model::ChromaEncoder<float>& encoder);

/// CSV `segment_id,species,e0..e{d'-1}`.
void write_embeddings_csv(const std::filesystem::path& path, const EmbeddingTable& table,
                          const std::vector<std::string>& species);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per-class seeded shuffle; round(test_fraction * n_c) items of each class
/// go to test, leaving at least one in train.
Split stratified_split(std::span<const Label> labels, double test_fraction, std::uint64_t seed);

Matrix<float> select_rows(const Matrix<float>& m, const std::vector<std::size_t>& rows);

// ---- similarity and frame statistics -----------------------------------------

/// z . zh / (|z| |zh|); 0 when either vector is zero.
double cosine_similarity(std::span<const float> z, std::span<const float> zh);

/// Pearson r across pitch classes. Throws InvalidArgument when either input is
/// constant (r undefined).
double pitch_class_correlation(std::span<const float> orig, std::span<const float> pred);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Per-frame mean and max over pitch classes, summarized over frames.
/// Deltas are |orig - pred| / orig * 100.
struct FrameDistributionReport {
  MeanStd orig_mean, pred_mean, orig_max, pred_max;
  double mean_delta_pct = 0.0;
  double std_delta_pct = 0.0;
  double max_delta_pct = 0.0;
};

/// Each matrix is 12 x k; frames are its columns.
FrameDistributionReport frame_distribution_stats(const std::vector<Matrix<float>>& originals,
                                                 const std::vector<Matrix<float>>& predictions);

}  // namespace arionet::eval
