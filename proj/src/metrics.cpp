//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synthweaver/rng.hpp"

namespace synthweaver {

double r_squared(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw MetricError("length mismatch");
  if (y.size() < 2) throw MetricError("need at least two points");
  double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_tot += (y[i] - mean) * (y[i] - mean);
    ss_res += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
  }
  if (ss_tot == 0.0) throw MetricError("zero-variance targets");
  return 1.0 - ss_res / ss_tot;
}

RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw MetricError("length mismatch");
  std::size_t n = scores.size();
  long pos = 0, neg = 0;
  for (int l : labels) (l != 0 ? pos : neg) += 1;
  if (pos == 0 || neg == 0) throw MetricError("both classes must be present");

  // rank statistic with the one-half tie convention
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] < scores[b]; });
  double wins = 0.0;
  {
    std::size_t i = 0;
    long neg_below = 0;
    while (i < n) {
      std::size_t j = i;
      long tie_pos = 0, tie_neg = 0;
      while (j < n && scores[order[j]] == scores[order[i]]) {
        (labels[order[j]] != 0 ? tie_pos : tie_neg) += 1;
        ++j;
      }
      wins += static_cast<double>(tie_pos) * (static_cast<double>(neg_below) +
                                              0.5 * static_cast<double>(tie_neg));
      neg_below += tie_neg;
      i = j;
    }
  }
  double auc_rank = wins / (static_cast<double>(pos) * static_cast<double>(neg));

  // threshold sweep, descending; tied scores move as one block
  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  std::reverse(order.begin(), order.end());
  long tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] != 0 ? tp : fp) += 1;
      ++j;
    }
    curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                              static_cast<double>(tp) / static_cast<double>(pos));
    i = j;
  }

  double auc_trap = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    auto [x0, y0] = curve.points[k - 1];
    auto [x1, y1] = curve.points[k];
    auc_trap += (x1 - x0) * 0.5 * (y0 + y1);
  }
  if (std::abs(auc_trap - auc_rank) > 1e-12)
    throw MetricError("ROC integral disagrees with the rank statistic");
  curve.auc = auc_rank;
  return curve;
}

std::vector<std::vector<int>> kfold(int n, int k, std::uint64_t seed) {
  if (k < 2) throw MetricError("k must be at least 2");
  if (k > n) throw MetricError("k exceeds the dataset size");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::vector<int>> folds(k);
  int base = n / k, extra = n % k;
  int at = 0;
  for (int f = 0; f < k; ++f) {
    int size = base + (f < extra ? 1 : 0);
    folds[f].assign(idx.begin() + at, idx.begin() + at + size);
    at += size;
  }
  return folds;
}

}  // namespace synthweaver
