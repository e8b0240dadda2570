//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "synthweaver/mpnn.hpp"
#include "synthweaver/oracle.hpp"

namespace synthweaver {

struct Dataset {
  std::vector<Molecule> mols;
  std::vector<double> scores;  // oracle values in [1,10] plus 11 for no-route
  std::size_t size() const { return mols.size(); }
};

struct TrainConfig {
  Hyperparams hp{};
  Task task = Task::Regression;
  int epochs = 50;
  int batch_size = 64;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  int k_folds = 5;
  int patience = 10;  // early-stop patience on the fold holdout; <=0 disables
  int workers = 1;    // folds run as independent workers
};

struct FoldMetric {
  int fold = 0;
  double value = std::numeric_limits<double>::quiet_NaN();
  bool valid = false;  // false when the metric is undefined (zero variance)
};

struct TrainReport {
  std::vector<FoldMetric> fold_metrics;  // R^2 (regression) or AUC (classification)
  double pooled_holdout = std::numeric_limits<double>::quiet_NaN();
  bool pooled_valid = false;
  double in_sample = std::numeric_limits<double>::quiet_NaN();
  bool in_sample_valid = false;
  std::vector<double> holdout_true;  // pooled over folds, fold-major order
  std::vector<double> holdout_pred;
  bool aborted = false;  // divergence; model holds the last good weights
  std::string warning;
};

struct TrainOutput {
  SurrogateModel model;  // trained on all data
  TrainReport report;
};

// Classification target from an oracle score.
inline double route_exists_label(double score) { return score < kNoRouteScore ? 1.0 : 0.0; }

// Adaptive-moment stochastic training with k-fold cross-validation. Fully
// deterministic for a given (seed, data, config), independent of `workers`.
TrainOutput train(const TrainConfig& cfg, const Dataset& dataset);

}  // namespace synthweaver
