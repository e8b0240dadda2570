//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <cmath>

#include "synthweaver/mpnn.hpp"

namespace synthweaver::test {

struct GradCheckResult {
  double max_rel_err = 0.0;
  int entries = 0;
};

// Central finite differences over every parameter entry, dropout off.
inline GradCheckResult gradcheck(SurrogateModel model, const BatchGraph& batch,
                                 const Eigen::VectorXd& targets, double h = 1e-4) {
  LossGrad analytic = loss_and_grad(model, batch, targets, nullptr);
  GradCheckResult res;
  auto tensors = model.tensors();
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    Eigen::MatrixXd& w = *tensors[t].second;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        double saved = w(i, j);
        w(i, j) = saved + h;
        double lp = loss_and_grad(model, batch, targets, nullptr).loss;
        w(i, j) = saved - h;
        double lm = loss_and_grad(model, batch, targets, nullptr).loss;
        w(i, j) = saved;
        double numeric = (lp - lm) / (2.0 * h);
        double a = analytic.grads[t](i, j);
        double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-3});
        res.max_rel_err = std::max(res.max_rel_err, rel);
        ++res.entries;
      }
    }
  }
  return res;
}

}  // namespace synthweaver::test
