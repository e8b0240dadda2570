//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "synthweaver/features.hpp"
#include "synthweaver/molecule.hpp"
#include "synthweaver/rng.hpp"

namespace synthweaver {

enum class Task { Regression, Classification };

const char* task_name(Task t);

struct Hyperparams {
  int hidden = 128;
  int depth = 6;
  double dropout = 0.05;
};

class TrainError : public MoleculeError {
 public:
  using MoleculeError::MoleculeError;
};

// Directed-edge message passing network with shared message weights across
// iterations, a skip connection to the input projection, sum pooling and a
// two-layer readout head.
struct SurrogateModel {
  Hyperparams hp;
  Task task = Task::Regression;
  FeatureSchema schema;

  Eigen::MatrixXd w_in;    // (node_dim + edge_dim) x hidden
  Eigen::MatrixXd b_in;    // 1 x hidden
  Eigen::MatrixXd w_msg;   // hidden x hidden
  Eigen::MatrixXd w_atom;  // (node_dim + hidden) x hidden
  Eigen::MatrixXd b_atom;  // 1 x hidden
  Eigen::MatrixXd w_out1;  // hidden x hidden
  Eigen::MatrixXd b_out1;  // 1 x hidden
  Eigen::MatrixXd w_out2;  // hidden x 1
  Eigen::MatrixXd b_out2;  // 1 x 1

  static SurrogateModel init(Hyperparams hp, Task task, std::uint64_t seed);

  // named weight tensors, fixed order; shared by the optimizer, the
  // checkpoint format and gradient checks
  std::vector<std::pair<std::string, Eigen::MatrixXd*>> tensors();
  std::vector<std::pair<std::string, const Eigen::MatrixXd*>> tensors() const;
};

// Forward pass over a packed batch; one output per graph. Regression outputs
// are unbounded; classification outputs are probabilities in (0,1). Dropout
// fires only when train_mode and draws its masks from dropout_rng.
Eigen::VectorXd forward(const SurrogateModel& model, const BatchGraph& batch, bool train_mode,
                        Rng* dropout_rng = nullptr);

struct LossGrad {
  double loss = 0.0;
  std::vector<Eigen::MatrixXd> grads;  // aligned with SurrogateModel::tensors()
};

// Mean loss over the batch (MSE for regression, binary cross-entropy for
// classification) plus gradients for every weight tensor via reverse-mode
// accumulation. Throws TrainError naming the first offending record when the
// loss turns non-finite.
LossGrad loss_and_grad(const SurrogateModel& model, const BatchGraph& batch,
                       const Eigen::VectorXd& targets, Rng* dropout_rng = nullptr);

// Inference on one molecule. Regression predictions are clamped to [1,11];
// classification returns the route-existence probability.
double predict(const SurrogateModel& model, const Molecule& mol);
Eigen::VectorXd predict_batch(const SurrogateModel& model, std::span<const Molecule> mols);

void save_checkpoint(const SurrogateModel& model, const std::filesystem::path& path);
// Loads and validates a checkpoint. When `expected_task` is given, a stored
// model of the other task kind is a task-mismatch error.
SurrogateModel load_checkpoint(const std::filesystem::path& path,
                               std::optional<Task> expected_task = std::nullopt);

}  // namespace synthweaver
