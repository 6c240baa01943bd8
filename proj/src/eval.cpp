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

#include "arionet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "arionet/binary_io.hpp"
#include "arionet/errors.hpp"

namespace arionet::eval {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

Label vote(const std::vector<std::size_t>& counts) {
  // max_element returns the first maximum, i.e. the smallest id on ties.
  return static_cast<Label>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

// ---- confusion matrix and metrics --------------------------------------------

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_(classes * classes, 0) {}

ConfusionMatrix ConfusionMatrix::from_labels(std::span<const Label> truth,
                                             std::span<const Label> pred, std::size_t classes) {
  if (truth.size() != pred.size()) {
    throw InvalidArgument("confusion matrix: " + std::to_string(truth.size()) + " labels vs " +
                          std::to_string(pred.size()) + " predictions");
  }
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], pred[i]);
  return cm;
}

void ConfusionMatrix::add(Label truth, Label pred, std::uint64_t count) {
  if (truth >= classes_ || pred >= classes_) {
    throw InvalidArgument("confusion matrix: label outside [0, " + std::to_string(classes_) + ")");
  }
  counts_[truth * classes_ + pred] += count;
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

EvalReport metrics(const ConfusionMatrix& cm) {
  const std::size_t c = cm.classes();
  const std::uint64_t total = cm.total();
  if (c == 0 || total == 0) throw InvalidArgument("metrics: empty confusion matrix");
  const double n = static_cast<double>(total);

  std::vector<double> row(c, 0.0), col(c, 0.0);
  double trace = 0.0, mae = 0.0;
  for (std::size_t t = 0; t < c; ++t) {
    for (std::size_t p = 0; p < c; ++p) {
      const double v = static_cast<double>(cm.at(t, p));
      row[t] += v;
      col[p] += v;
      if (t == p) trace += v;
      mae += v * std::abs(static_cast<double>(t) - static_cast<double>(p));
    }
  }

  EvalReport r;
  r.accuracy = trace / n;
  r.label_mae = mae / n;
  for (std::size_t k = 0; k < c; ++k) {
    ClassMetrics m;
    m.tp = cm.at(k, k);
    m.fp = static_cast<std::uint64_t>(col[k]) - m.tp;
    m.fn = static_cast<std::uint64_t>(row[k]) - m.tp;
    m.tn = total - m.tp - m.fp - m.fn;
    const double tp = static_cast<double>(m.tp), fp = static_cast<double>(m.fp);
    const double fn = static_cast<double>(m.fn), tn = static_cast<double>(m.tn);
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.specificity = ratio(tn, tn + fp);
    m.npv = ratio(tn, tn + fn);
    m.fdr = 1.0 - m.precision;
    m.fnr = 1.0 - m.recall;
    m.fpr = 1.0 - m.specificity;
    m.f1 = ratio(2.0 * tp, 2.0 * tp + fp + fn);
    const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    m.mcc = den == 0.0 ? 0.0 : (tp * tn - fp * fn) / std::sqrt(den);
    r.per_class.push_back(m);

    r.precision += m.precision;
    r.recall += m.recall;
    r.f1 += m.f1;
    r.specificity += m.specificity;
    r.npv += m.npv;
    r.fpr += m.fpr;
    r.fdr += m.fdr;
    r.fnr += m.fnr;
    r.mcc += m.mcc;
  }
  const double inv = 1.0 / static_cast<double>(c);
  for (double* v : {&r.precision, &r.recall, &r.f1, &r.specificity, &r.npv, &r.fpr, &r.fdr,
                    &r.fnr, &r.mcc}) {
    *v *= inv;
  }

  double pe = 0.0;
  for (std::size_t k = 0; k < c; ++k) pe += row[k] * col[k];
  pe /= n * n;
  const double po = r.accuracy;
  r.kappa = pe == 1.0 ? (po == 1.0 ? 1.0 : 0.0) : (po - pe) / (1.0 - pe);
  return r;
}

namespace {

struct MetricField {
  const char* name;
  double EvalReport::*macro;
  double ClassMetrics::*per_class;
};

constexpr MetricField kFields[] = {
    {"precision", &EvalReport::precision, &ClassMetrics::precision},
    {"recall", &EvalReport::recall, &ClassMetrics::recall},
    {"f1", &EvalReport::f1, &ClassMetrics::f1},
    {"specificity", &EvalReport::specificity, &ClassMetrics::specificity},
    {"npv", &EvalReport::npv, &ClassMetrics::npv},
    {"fpr", &EvalReport::fpr, &ClassMetrics::fpr},
    {"fdr", &EvalReport::fdr, &ClassMetrics::fdr},
    {"fnr", &EvalReport::fnr, &ClassMetrics::fnr},
    {"mcc", &EvalReport::mcc, &ClassMetrics::mcc},
};

std::string class_name(const std::vector<std::string>& names, std::size_t i) {
  return i < names.size() ? names[i] : std::to_string(i);
}

}  // namespace

std::string report_csv(const EvalReport& report, const std::vector<std::string>& class_names) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "metric,value\n";
  os << "accuracy," << report.accuracy << '\n';
  for (const auto& f : kFields) os << f.name << ',' << report.*(f.macro) << '\n';
  os << "kappa," << report.kappa << '\n';
  os << "label_mae," << report.label_mae << '\n';
  for (std::size_t i = 0; i < report.per_class.size(); ++i) {
    const auto& m = report.per_class[i];
    const auto cls = class_name(class_names, i);
    for (const auto& f : kFields) os << f.name << '[' << cls << "]," << m.*(f.per_class) << '\n';
  }
  return os.str();
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& report,
                      const std::vector<std::string>& class_names) {
  io::write_text_atomic(path, report_csv(report, class_names));
}

std::string report_table(const EvalReport& report, const std::vector<std::string>& class_names) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << std::left << std::setw(14) << "accuracy" << report.accuracy << '\n';
  for (const auto& f : kFields) os << std::setw(14) << f.name << report.*(f.macro) << '\n';
  os << std::setw(14) << "kappa" << report.kappa << '\n';
  os << std::setw(14) << "label_mae" << report.label_mae << "  (mean |true id - predicted id|)\n";
  os << '\n' << std::setw(20) << "class" << std::right;
  for (const char* h : {"prec", "recall", "f1", "spec", "mcc"}) os << std::setw(9) << h;
  os << '\n';
  for (std::size_t i = 0; i < report.per_class.size(); ++i) {
    const auto& m = report.per_class[i];
    os << std::left << std::setw(20) << class_name(class_names, i) << std::right;
    for (double v : {m.precision, m.recall, m.f1, m.specificity, m.mcc}) os << std::setw(9) << v;
    os << '\n';
  }
  return os.str();
}

// ---- forest -------------------------------------------------------------------

Label DecisionTree::predict(std::span<const float> x) const {
  std::int32_t i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return static_cast<Label>(nodes[static_cast<std::size_t>(i)].label);
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.feature >= 0) {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return best;
}

namespace {

struct SplitChoice {
  std::int32_t feature = -1;
  float threshold = 0.0f;
  double impurity = std::numeric_limits<double>::infinity();
};

// Weighted Gini impurity, scaled by node size: sum over sides of n - sum(c^2)/n.
double side_impurity(const std::vector<std::size_t>& counts, std::size_t n) {
  if (n == 0) return 0.0;
  double sq = 0.0;
  for (auto v : counts) sq += static_cast<double>(v) * static_cast<double>(v);
  return static_cast<double>(n) - sq / static_cast<double>(n);
}

DecisionTree build_tree(const Matrix<float>& x, std::span<const Label> y, std::size_t classes,
                        std::size_t max_features, std::size_t max_depth, std::uint64_t seed) {
  const std::size_t n = x.rows(), d = x.cols();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> idx(n);
  for (auto& v : idx) v = pick(rng);

  DecisionTree tree;
  tree.nodes.emplace_back();
  struct Work {
    std::size_t node, begin, end, depth;
  };
  std::vector<Work> stack{{0, 0, n, 0}};
  std::vector<std::size_t> features(d);
  std::iota(features.begin(), features.end(), std::size_t{0});
  std::vector<std::pair<float, Label>> col;
  std::vector<std::size_t> counts(classes), left(classes), right(classes);

  while (!stack.empty()) {
    const Work w = stack.back();
    stack.pop_back();
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = w.begin; i < w.end; ++i) ++counts[y[idx[i]]];
    const std::size_t size = w.end - w.begin;
    tree.nodes[w.node].label = static_cast<std::int32_t>(vote(counts));
    const bool pure = *std::max_element(counts.begin(), counts.end()) == size;
    if (pure || size < 2 || (max_depth > 0 && w.depth >= max_depth)) continue;

    SplitChoice best;
    std::shuffle(features.begin(), features.end(), rng);
    std::size_t tried = 0;
    for (std::size_t fi = 0; fi < d && tried < max_features; ++fi) {
      const std::size_t f = features[fi];
      col.clear();
      for (std::size_t i = w.begin; i < w.end; ++i) col.push_back({x(idx[i], f), y[idx[i]]});
      std::sort(col.begin(), col.end());
      if (col.front().first == col.back().first) continue;  // constant here
      ++tried;
      std::fill(left.begin(), left.end(), 0);
      right = counts;
      for (std::size_t i = 0; i + 1 < col.size(); ++i) {
        ++left[col[i].second];
        --right[col[i].second];
        if (col[i].first == col[i + 1].first) continue;
        const double imp = side_impurity(left, i + 1) + side_impurity(right, size - i - 1);
        if (imp < best.impurity) {
          float thr = col[i].first + (col[i + 1].first - col[i].first) * 0.5f;
          if (!(thr < col[i + 1].first)) thr = col[i].first;
          best = {static_cast<std::int32_t>(f), thr, imp};
        }
      }
    }
    if (best.feature < 0) continue;

    const auto f = static_cast<std::size_t>(best.feature);
    const auto mid = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(w.begin),
                                    idx.begin() + static_cast<std::ptrdiff_t>(w.end),
                                    [&](std::size_t i) { return x(i, f) <= best.threshold; });
    const auto split = static_cast<std::size_t>(mid - idx.begin());
    const auto l = tree.nodes.size();
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[w.node];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = static_cast<std::int32_t>(l);
    node.right = static_cast<std::int32_t>(l + 1);
    stack.push_back({l + 1, split, w.end, w.depth + 1});
    stack.push_back({l, w.begin, split, w.depth + 1});
  }
  return tree;
}

void check_xy(const Matrix<float>& x, std::span<const Label> y, const char* who) {
  if (x.rows() == 0) throw InvalidArgument(std::string(who) + ": empty training set");
  if (x.rows() != y.size()) {
    throw InvalidArgument(std::string(who) + ": " + std::to_string(x.rows()) + " rows vs " +
                          std::to_string(y.size()) + " labels");
  }
}

}  // namespace

Label ForestModel::predict(std::span<const float> x) const {
  if (x.size() != features) {
    throw InvalidArgument("forest: expected " + std::to_string(features) + " features, got " +
                          std::to_string(x.size()));
  }
  std::vector<std::size_t> counts(classes, 0);
  for (const auto& t : trees) ++counts[t.predict(x)];
  return vote(counts);
}

std::vector<Label> ForestModel::predict(const Matrix<float>& x) const {
  std::vector<Label> out(x.rows());
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = predict(x.row(static_cast<std::size_t>(i)));
  }
  return out;
}

ForestModel fit_forest(const Matrix<float>& x, std::span<const Label> y,
                       const ForestOptions& opts) {
  check_xy(x, y, "fit_forest");
  if (opts.trees == 0) throw InvalidArgument("fit_forest: trees must be positive");
  const std::set<Label> distinct(y.begin(), y.end());
  if (distinct.size() < 2) {
    throw InvalidArgument("fit_forest: training set has a single class; need at least two");
  }
  ForestModel model;
  model.classes = static_cast<std::size_t>(*distinct.rbegin()) + 1;
  model.features = x.cols();
  const std::size_t max_features =
      opts.max_features > 0
          ? std::min(opts.max_features, x.cols())
          : std::max<std::size_t>(1, static_cast<std::size_t>(
                                         std::floor(std::sqrt(static_cast<double>(x.cols())))));
  model.trees.resize(opts.trees);
  const auto trees = static_cast<std::ptrdiff_t>(opts.trees);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < trees; ++t) {
    model.trees[static_cast<std::size_t>(t)] =
        build_tree(x, y, model.classes, max_features, opts.max_depth,
                   mix_seed(opts.seed, static_cast<std::uint64_t>(t)));
  }
  return model;
}

Label knn_predict(const Matrix<float>& train_x, std::span<const Label> train_y,
                  std::span<const float> query, std::size_t k) {
  check_xy(train_x, train_y, "knn_predict");
  if (k == 0) throw InvalidArgument("knn_predict: k must be positive");
  if (query.size() != train_x.cols()) {
    throw InvalidArgument("knn_predict: query has " + std::to_string(query.size()) +
                          " features, expected " + std::to_string(train_x.cols()));
  }
  k = std::min(k, train_x.rows());
  std::vector<std::pair<double, std::size_t>> dist(train_x.rows());
  for (std::size_t i = 0; i < train_x.rows(); ++i) {
    const auto row = train_x.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double dj = static_cast<double>(row[j]) - query[j];
      acc += dj * dj;
    }
    dist[i] = {acc, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  const Label max_label = *std::max_element(train_y.begin(), train_y.end());
  std::vector<std::size_t> counts(max_label + 1, 0);
  for (std::size_t i = 0; i < k; ++i) ++counts[train_y[dist[i].second]];
  return vote(counts);
}

std::vector<Label> Classifier::predict(const Matrix<float>& x) const {
  if (kind == ClassifierKind::kForest) return forest.predict(x);
  std::vector<Label> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = knn_predict(train_x, train_y, x.row(i), k);
  return out;
}

std::vector<std::uint8_t> encode_classifier(const Classifier& c) {
  io::ByteWriter w;
  w.put_bytes(std::string_view(kClassifierMagic, 4));
  w.put<std::uint32_t>(kClassifierVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(c.kind));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(c.class_names.size()));
  for (const auto& name : c.class_names) {
    w.put<std::uint16_t>(static_cast<std::uint16_t>(name.size()));
    w.put_bytes(name);
  }
  w.put<std::uint64_t>(c.split_seed);
  w.put<double>(c.test_fraction);
  if (c.kind == ClassifierKind::kForest) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(c.forest.features));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(c.forest.trees.size()));
    for (const auto& t : c.forest.trees) {
      w.put<std::uint32_t>(static_cast<std::uint32_t>(t.nodes.size()));
      for (const auto& n : t.nodes) {
        w.put<std::int32_t>(n.feature);
        w.put<float>(n.threshold);
        w.put<std::int32_t>(n.left);
        w.put<std::int32_t>(n.right);
        w.put<std::int32_t>(n.label);
      }
    }
  } else {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(c.train_x.cols()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(c.k));
    w.put<std::uint64_t>(c.train_x.rows());
    w.put_array<float>(c.train_x.data());
    w.put_array<std::uint32_t>(c.train_y);
  }
  return w.bytes();
}

Classifier decode_classifier(std::vector<std::uint8_t> bytes) {
  io::ByteReader r(std::move(bytes), "classifier");
  if (r.remaining() < 4 || r.get_string(4) != std::string(kClassifierMagic, 4)) {
    throw FormatError(FormatError::Kind::kBadMagic, "classifier: bad magic");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kClassifierVersion) {
    throw FormatError(FormatError::Kind::kUnsupportedVersion,
                      "classifier: unsupported version " + std::to_string(version));
  }
  auto invalid = [](const std::string& what) {
    return FormatError(FormatError::Kind::kInvalidRecord, "classifier: " + what);
  };
  Classifier c;
  const auto kind = r.get<std::uint8_t>();
  if (kind > 1) throw invalid("unknown kind " + std::to_string(kind));
  c.kind = static_cast<ClassifierKind>(kind);
  const auto classes = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < classes; ++i) {
    c.class_names.push_back(r.get_string(r.get<std::uint16_t>()));
  }
  c.split_seed = r.get<std::uint64_t>();
  c.test_fraction = r.get<double>();
  if (!(c.test_fraction >= 0.0 && c.test_fraction < 1.0)) throw invalid("bad test fraction");
  const auto features = r.get<std::uint32_t>();
  if (c.kind == ClassifierKind::kForest) {
    c.forest.classes = classes;
    c.forest.features = features;
    const auto trees = r.get<std::uint32_t>();
    for (std::uint32_t t = 0; t < trees; ++t) {
      DecisionTree tree;
      const auto count = r.get<std::uint32_t>();
      if (count == 0) throw invalid("empty tree");
      for (std::uint32_t i = 0; i < count; ++i) {
        TreeNode n;
        n.feature = r.get<std::int32_t>();
        n.threshold = r.get<float>();
        n.left = r.get<std::int32_t>();
        n.right = r.get<std::int32_t>();
        n.label = r.get<std::int32_t>();
        const auto in_range = [&](std::int32_t v) {
          return v > static_cast<std::int32_t>(i) && v < static_cast<std::int32_t>(count);
        };
        if (n.label < 0 || static_cast<std::uint32_t>(n.label) >= classes) throw invalid("bad leaf label");
        if (n.feature >= 0 && (static_cast<std::uint32_t>(n.feature) >= features ||
                               !in_range(n.left) || !in_range(n.right))) {
          throw invalid("bad split node");
        }
        tree.nodes.push_back(n);
      }
      c.forest.trees.push_back(std::move(tree));
    }
  } else {
    c.k = r.get<std::uint32_t>();
    const auto rows = r.get<std::uint64_t>();
    if (rows * features * sizeof(float) > r.remaining()) {
      throw FormatError(FormatError::Kind::kTruncated, "classifier: truncated training matrix");
    }
    c.train_x = Matrix<float>(rows, features);
    r.get_array<float>(c.train_x.data());
    c.train_y.resize(rows);
    r.get_array<std::uint32_t>(c.train_y);
    for (auto y : c.train_y) {
      if (y >= classes) throw invalid("bad training label");
    }
  }
  if (!r.at_end()) throw invalid("trailing bytes");
  return c;
}

void write_classifier(const std::filesystem::path& path, const Classifier& c) {
  io::write_file_atomic(path, encode_classifier(c));
}

Classifier read_classifier(const std::filesystem::path& path) {
  return decode_classifier(io::read_file(path));
}

// ---- embeddings and splits ---------------------------------------------------

EmbeddingTable embed_all(const pipeline::FeatureStore& store,
                         model::ChromaEncoder<float>& encoder) {
  const bool was_training = encoder.training();
  encoder.set_training(false);
  const std::size_t n = store.records.size();
  const std::size_t d = encoder.config().proj_dim;
  EmbeddingTable table{Matrix<float>(n, d), std::vector<Label>(n), std::vector<std::uint32_t>(n)};
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto& rec = store.records[static_cast<std::size_t>(i)];
    const auto u = encoder.forward(rec.chroma).u_unit;
    auto row = table.values.row(static_cast<std::size_t>(i));
    std::copy(u.data().begin(), u.data().end(), row.begin());
    table.labels[static_cast<std::size_t>(i)] = rec.species_id;
    table.segment_ids[static_cast<std::size_t>(i)] = rec.segment_id;
  }
  encoder.set_training(was_training);
  return table;
}

void write_embeddings_csv(const std::filesystem::path& path, const EmbeddingTable& table,
                          const std::vector<std::string>& species) {
  std::ostringstream os;
  os << std::setprecision(9);
  os << "segment_id,species";
  for (std::size_t j = 0; j < table.values.cols(); ++j) os << ",e" << j;
  os << '\n';
  for (std::size_t i = 0; i < table.values.rows(); ++i) {
    os << table.segment_ids[i] << ',' << class_name(species, table.labels[i]);
    for (float v : table.values.row(i)) os << ',' << v;
    os << '\n';
  }
  io::write_text_atomic(path, os.str());
}

Split stratified_split(std::span<const Label> labels, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("stratified_split: test fraction must lie in [0, 1)");
  }
  std::mt19937_64 rng(seed);
  const std::set<Label> classes(labels.begin(), labels.end());
  Split s;
  for (Label c : classes) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);
    auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    n_test = std::min(n_test, members.size() - 1);
    s.test.insert(s.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    s.train.insert(s.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

Matrix<float> select_rows(const Matrix<float>& m, const std::vector<std::size_t>& rows) {
  Matrix<float> out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = m.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

// ---- similarity and statistics -----------------------------------------------

double cosine_similarity(std::span<const float> z, std::span<const float> zh) {
  if (z.size() != zh.size()) {
    throw InvalidArgument("cosine_similarity: lengths " + std::to_string(z.size()) + " and " +
                          std::to_string(zh.size()));
  }
  double dot = 0.0, a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    dot += static_cast<double>(z[i]) * zh[i];
    a += static_cast<double>(z[i]) * z[i];
    b += static_cast<double>(zh[i]) * zh[i];
  }
  if (a == 0.0 || b == 0.0) return 0.0;
  return dot / (std::sqrt(a) * std::sqrt(b));
}

double pitch_class_correlation(std::span<const float> orig, std::span<const float> pred) {
  if (orig.size() != pred.size() || orig.empty()) {
    throw InvalidArgument("pitch_class_correlation: inputs must be non-empty and equal length");
  }
  const double n = static_cast<double>(orig.size());
  double mo = 0.0, mp = 0.0;
  for (std::size_t i = 0; i < orig.size(); ++i) {
    mo += orig[i];
    mp += pred[i];
  }
  mo /= n;
  mp /= n;
  double cov = 0.0, vo = 0.0, vp = 0.0;
  for (std::size_t i = 0; i < orig.size(); ++i) {
    const double a = orig[i] - mo, b = pred[i] - mp;
    cov += a * b;
    vo += a * a;
    vp += b * b;
  }
  if (vo == 0.0 || vp == 0.0) {
    throw InvalidArgument("pitch_class_correlation: undefined for a constant frame");
  }
  return cov / std::sqrt(vo * vp);
}

namespace {

MeanStd summarize(const std::vector<double>& v) {
  MeanStd s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  for (double x : v) s.std += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(s.std / static_cast<double>(v.size()));
  return s;
}

double pct_delta(double orig, double pred) {
  if (orig == 0.0) return pred == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(orig - pred) / std::abs(orig) * 100.0;
}

void frame_stats(const std::vector<Matrix<float>>& frames, std::vector<double>& means,
                 std::vector<double>& maxes) {
  for (const auto& m : frames) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      double sum = 0.0, mx = -std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m.rows(); ++r) {
        sum += m(r, c);
        mx = std::max(mx, static_cast<double>(m(r, c)));
      }
      means.push_back(sum / static_cast<double>(m.rows()));
      maxes.push_back(mx);
    }
  }
}

}  // namespace

FrameDistributionReport frame_distribution_stats(const std::vector<Matrix<float>>& originals,
                                                 const std::vector<Matrix<float>>& predictions) {
  if (originals.size() != predictions.size() || originals.empty()) {
    throw InvalidArgument("frame_distribution_stats: need equal, non-empty sets");
  }
  for (std::size_t i = 0; i < originals.size(); ++i) {
    if (originals[i].rows() != predictions[i].rows() ||
        originals[i].cols() != predictions[i].cols()) {
      throw InvalidArgument("frame_distribution_stats: shape mismatch at item " +
                            std::to_string(i));
    }
  }
  std::vector<double> om, ox, pm, px;
  frame_stats(originals, om, ox);
  frame_stats(predictions, pm, px);
  FrameDistributionReport r;
  r.orig_mean = summarize(om);
  r.pred_mean = summarize(pm);
  r.orig_max = summarize(ox);
  r.pred_max = summarize(px);
  r.mean_delta_pct = pct_delta(r.orig_mean.mean, r.pred_mean.mean);
  r.std_delta_pct = pct_delta(r.orig_mean.std, r.pred_mean.std);
  r.max_delta_pct = pct_delta(r.orig_max.mean, r.pred_max.mean);
  return r;
}

}  // namespace arionet::eval
