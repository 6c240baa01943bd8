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

// Direct-formula metric oracle working from expanded (truth, pred) pairs.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "arionet/eval.hpp"

namespace arionet::testutil {

struct OracleReport {
  double accuracy = 0, precision = 0, recall = 0, f1 = 0, specificity = 0, npv = 0;
  double fpr = 0, fdr = 0, fnr = 0, mcc = 0, kappa = 0, label_mae = 0;
};

inline double safe_div(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

// Pearson correlation of two indicator vectors; 0 if either is constant.
inline double indicator_correlation(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

inline OracleReport oracle_metrics(const eval::ConfusionMatrix& cm) {
  std::vector<std::size_t> truth, pred;
  for (std::size_t t = 0; t < cm.classes(); ++t) {
    for (std::size_t p = 0; p < cm.classes(); ++p) {
      for (std::uint64_t i = 0; i < cm.at(t, p); ++i) {
        truth.push_back(t);
        pred.push_back(p);
      }
    }
  }
  const std::size_t n = truth.size();
  const std::size_t c = cm.classes();
  OracleReport r;
  std::size_t correct = 0;
  double abs_err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    correct += truth[i] == pred[i];
    abs_err += std::abs(static_cast<double>(truth[i]) - static_cast<double>(pred[i]));
  }
  r.accuracy = static_cast<double>(correct) / n;
  r.label_mae = abs_err / n;

  double pe = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    double tp = 0, fp = 0, fn = 0, tn = 0;
    std::vector<int> it(n), ip(n);
    for (std::size_t i = 0; i < n; ++i) {
      const bool t = truth[i] == k, p = pred[i] == k;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
      tn += !t && !p;
      it[i] = t;
      ip[i] = p;
    }
    const double prec = safe_div(tp, tp + fp), rec = safe_div(tp, tp + fn);
    const double spec = safe_div(tn, tn + fp);
    r.precision += prec / c;
    r.recall += rec / c;
    r.f1 += safe_div(2 * tp, 2 * tp + fp + fn) / c;
    r.specificity += spec / c;
    r.npv += safe_div(tn, tn + fn) / c;
    r.fpr += (1.0 - spec) / c;
    r.fdr += (1.0 - prec) / c;
    r.fnr += (1.0 - rec) / c;
    r.mcc += indicator_correlation(it, ip) / c;
    pe += ((tp + fn) / n) * ((tp + fp) / n);
  }
  if (pe == 1.0) {
    r.kappa = r.accuracy == 1.0 ? 1.0 : 0.0;
  } else {
    r.kappa = (r.accuracy - pe) / (1.0 - pe);
  }
  return r;
}

/// Largest absolute difference across every report field.
inline double max_report_error(const eval::EvalReport& got, const OracleReport& want) {
  const double pairs[][2] = {
      {got.accuracy, want.accuracy}, {got.precision, want.precision},
      {got.recall, want.recall},     {got.f1, want.f1},
      {got.specificity, want.specificity}, {got.npv, want.npv},
      {got.fpr, want.fpr},           {got.fdr, want.fdr},
      {got.fnr, want.fnr},           {got.mcc, want.mcc},
      {got.kappa, want.kappa},       {got.label_mae, want.label_mae}};
  double worst = 0.0;
  for (const auto& p : pairs) worst = std::max(worst, std::abs(p[0] - p[1]));
  return worst;
}

/// Random matrix with 0..max_count per cell and at least one entry.
template <typename Rng>
eval::ConfusionMatrix random_confusion(std::size_t classes, Rng& rng, std::uint64_t max_count) {
  eval::ConfusionMatrix cm(classes);
  for (std::size_t t = 0; t < classes; ++t) {
    for (std::size_t p = 0; p < classes; ++p) {
      cm.add(static_cast<eval::Label>(t), static_cast<eval::Label>(p), rng() % (max_count + 1));
    }
  }
  if (cm.total() == 0) cm.add(0, 0);
  return cm;
}

}  // namespace arionet::testutil
