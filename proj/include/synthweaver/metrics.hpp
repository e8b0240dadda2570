//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace synthweaver {

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Coefficient of determination, 1 - SS_res/SS_tot. Throws on fewer than two
// points or zero-variance targets.
double r_squared(std::span<const double> y, std::span<const double> y_hat);

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
  double auc = 0.0;
};

// ROC curve by threshold sweep plus AUC by the rank statistic (ties count
// one half). The trapezoid integral of the curve agrees with the rank
// statistic to 1e-12 by construction; both are computed and cross-checked.
// Throws when only one class is present.
RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels);

// Seeded shuffle then contiguous split into k folds of near-equal size
// (sizes differ by at most one). Returns index lists.
std::vector<std::vector<int>> kfold(int n, int k, std::uint64_t seed);

}  // namespace synthweaver
