//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/train.hpp"

#include <algorithm>
#include <numeric>

#include "synthweaver/metrics.hpp"
#include "synthweaver/parallel.hpp"

namespace synthweaver {

namespace {

struct AdamState {
  std::vector<Eigen::MatrixXd> m, v;
  long t = 0;
  void init(SurrogateModel& model) {
    for (auto& [name, mat] : model.tensors()) {
      m.push_back(Eigen::MatrixXd::Zero(mat->rows(), mat->cols()));
      v.push_back(Eigen::MatrixXd::Zero(mat->rows(), mat->cols()));
    }
  }
  void step(SurrogateModel& model, const std::vector<Eigen::MatrixXd>& grads, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t;
    auto tensors = model.tensors();
    double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * grads[i];
      v[i] = b2 * v[i] + (1.0 - b2) * grads[i].cwiseProduct(grads[i]);
      Eigen::MatrixXd mh = m[i] / c1;
      Eigen::MatrixXd vh = v[i] / c2;
      *tensors[i].second -=
          (lr * mh.array() / (vh.array().sqrt() + eps)).matrix();
    }
  }
};

double target_of(const TrainConfig& cfg, double score) {
  return cfg.task == Task::Regression ? score : route_exists_label(score);
}

// evaluation loss on a fixed set, no dropout
double eval_loss(const TrainConfig& cfg, const SurrogateModel& model, const Dataset& data,
                 const std::vector<int>& idx) {
  if (idx.empty()) return 0.0;
  std::vector<Molecule> mols;
  mols.reserve(idx.size());
  for (int i : idx) mols.push_back(data.mols[i]);
  BatchGraph batch = batch_featurize(mols, model.schema);
  Eigen::VectorXd out = forward(model, batch, /*train_mode=*/false);
  double loss = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    double y = target_of(cfg, data.scores[idx[k]]);
    if (cfg.task == Task::Regression) {
      double d = out(static_cast<Eigen::Index>(k)) - y;
      loss += d * d;
    } else {
      double p = std::clamp(out(static_cast<Eigen::Index>(k)), 1e-12, 1.0 - 1e-12);
      loss += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
  }
  return loss / static_cast<double>(idx.size());
}

struct SingleResult {
  SurrogateModel model;
  bool aborted = false;
};

// One optimization run over train_idx; early-stops on val_idx when given.
SingleResult train_single(const TrainConfig& cfg, const Dataset& data,
                          std::vector<int> train_idx, const std::vector<int>& val_idx,
                          std::uint64_t stream) {
  SingleResult result{SurrogateModel::init(cfg.hp, cfg.task, Rng::derive(cfg.seed, stream))};
  SurrogateModel& model = result.model;
  AdamState adam;
  adam.init(model);
  Rng dropout_rng(Rng::derive(cfg.seed, stream ^ 0xd30b0d30ull));

  SurrogateModel last_good = model;
  SurrogateModel best = model;
  double best_val = std::numeric_limits<double>::infinity();
  int since_improve = 0;
  bool use_early_stop = !val_idx.empty() && cfg.patience > 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(Rng::derive(cfg.seed, stream * 1315423911ull + epoch));
    for (std::size_t i = train_idx.size(); i > 1; --i) {
      std::size_t j = shuffle_rng.next_below(i);
      std::swap(train_idx[i - 1], train_idx[j]);
    }
    for (std::size_t at = 0; at < train_idx.size(); at += cfg.batch_size) {
      std::size_t end = std::min(at + cfg.batch_size, train_idx.size());
      std::vector<Molecule> mols;
      Eigen::VectorXd targets(static_cast<Eigen::Index>(end - at));
      mols.reserve(end - at);
      for (std::size_t k = at; k < end; ++k) {
        mols.push_back(data.mols[train_idx[k]]);
        targets(static_cast<Eigen::Index>(k - at)) = target_of(cfg, data.scores[train_idx[k]]);
      }
      BatchGraph batch = batch_featurize(mols, model.schema);
      try {
        LossGrad lg = loss_and_grad(model, batch, targets, &dropout_rng);
        adam.step(model, lg.grads, cfg.lr);
      } catch (const TrainError&) {
        // divergence: fall back to the last epoch-end weights
        result.model = use_early_stop ? best : last_good;
        result.aborted = true;
        return result;
      }
    }
    last_good = model;
    if (use_early_stop) {
      double val = eval_loss(cfg, model, data, val_idx);
      if (val < best_val - 1e-9) {
        best_val = val;
        best = model;
        since_improve = 0;
      } else if (++since_improve > cfg.patience) {
        break;
      }
    }
  }
  if (use_early_stop) result.model = best;
  return result;
}

// fold metric; invalid when undefined for the data (e.g. zero variance)
FoldMetric fold_metric(const TrainConfig& cfg, int fold, std::span<const double> y,
                       std::span<const double> pred) {
  FoldMetric fm;
  fm.fold = fold;
  try {
    if (cfg.task == Task::Regression) {
      fm.value = r_squared(y, pred);
    } else {
      std::vector<int> labels(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) labels[i] = y[i] != 0.0 ? 1 : 0;
      fm.value = roc_auc(pred, labels).auc;
    }
    fm.valid = true;
  } catch (const MetricError&) {
    fm.valid = false;
  }
  return fm;
}

}  // namespace

TrainOutput train(const TrainConfig& cfg, const Dataset& dataset) {
  int n = static_cast<int>(dataset.size());
  if (cfg.k_folds < 2) throw TrainError("k must be at least 2");
  if (cfg.lr <= 0.0) throw TrainError("learning rate must be positive");
  if (n < 10 * cfg.k_folds)
    throw TrainError("dataset too small: need at least 10 records per fold");

  TrainOutput out;
  auto folds = kfold(n, cfg.k_folds, Rng::derive(cfg.seed, 0xf01d));

  struct FoldOut {
    std::vector<double> truth, pred;
    FoldMetric metric;
    bool aborted = false;
  };
  std::vector<FoldOut> fold_out(folds.size());

  parallel_for(static_cast<int>(folds.size()), cfg.workers, [&](int f) {
    std::vector<int> train_idx;
    train_idx.reserve(n);
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (static_cast<int>(g) == f) continue;
      train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
    }
    SingleResult run = train_single(cfg, dataset, train_idx, folds[f], 100 + f);
    fold_out[f].aborted = run.aborted;

    std::vector<Molecule> val_mols;
    for (int i : folds[f]) val_mols.push_back(dataset.mols[i]);
    Eigen::VectorXd pred = predict_batch(run.model, val_mols);
    for (std::size_t k = 0; k < folds[f].size(); ++k) {
      fold_out[f].truth.push_back(target_of(cfg, dataset.scores[folds[f][k]]));
      fold_out[f].pred.push_back(pred(static_cast<Eigen::Index>(k)));
    }
    fold_out[f].metric = fold_metric(cfg, f, fold_out[f].truth, fold_out[f].pred);
  });

  for (auto& fo : fold_out) {
    out.report.fold_metrics.push_back(fo.metric);
    out.report.holdout_true.insert(out.report.holdout_true.end(), fo.truth.begin(),
                                   fo.truth.end());
    out.report.holdout_pred.insert(out.report.holdout_pred.end(), fo.pred.begin(),
                                   fo.pred.end());
    if (fo.aborted) out.report.aborted = true;
    if (!fo.metric.valid)
      out.report.warning = "fold metric not applicable (degenerate targets)";
  }
  FoldMetric pooled =
      fold_metric(cfg, -1, out.report.holdout_true, out.report.holdout_pred);
  out.report.pooled_holdout = pooled.value;
  out.report.pooled_valid = pooled.valid;

  // final model on all data
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  SingleResult final_run = train_single(cfg, dataset, all, {}, 7);
  out.model = final_run.model;
  if (final_run.aborted) out.report.aborted = true;

  Eigen::VectorXd in_pred = predict_batch(out.model, dataset.mols);
  std::vector<double> truth(n), predv(n);
  for (int i = 0; i < n; ++i) {
    truth[i] = target_of(cfg, dataset.scores[i]);
    predv[i] = in_pred(i);
  }
  FoldMetric ins = fold_metric(cfg, -2, truth, predv);
  out.report.in_sample = ins.value;
  out.report.in_sample_valid = ins.valid;
  return out;
}

}  // namespace synthweaver
