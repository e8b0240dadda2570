//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/mpnn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "synthweaver/autograd.hpp"

namespace synthweaver {

const char* task_name(Task t) {
  return t == Task::Regression ? "regression" : "classification";
}

namespace {

Eigen::MatrixXd glorot(int rows, int cols, Rng& rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.next_double(-limit, limit);
  }
  return m;
}

}  // namespace

SurrogateModel SurrogateModel::init(Hyperparams hp, Task task, std::uint64_t seed) {
  SurrogateModel m;
  m.hp = hp;
  m.task = task;
  Rng rng(Rng::derive(seed, 0x11));
  int nd = m.schema.node_dim(), ed = m.schema.edge_dim(), h = hp.hidden;
  m.w_in = glorot(nd + ed, h, rng);
  m.b_in = Eigen::MatrixXd::Zero(1, h);
  m.w_msg = glorot(h, h, rng);
  m.w_atom = glorot(nd + h, h, rng);
  m.b_atom = Eigen::MatrixXd::Zero(1, h);
  m.w_out1 = glorot(h, h, rng);
  m.b_out1 = Eigen::MatrixXd::Zero(1, h);
  m.w_out2 = glorot(h, 1, rng);
  m.b_out2 = Eigen::MatrixXd::Zero(1, 1);
  return m;
}

std::vector<std::pair<std::string, Eigen::MatrixXd*>> SurrogateModel::tensors() {
  return {{"w_in", &w_in},     {"b_in", &b_in},     {"w_msg", &w_msg},
          {"w_atom", &w_atom}, {"b_atom", &b_atom}, {"w_out1", &w_out1},
          {"b_out1", &b_out1}, {"w_out2", &w_out2}, {"b_out2", &b_out2}};
}

std::vector<std::pair<std::string, const Eigen::MatrixXd*>> SurrogateModel::tensors() const {
  auto mutable_list = const_cast<SurrogateModel*>(this)->tensors();
  std::vector<std::pair<std::string, const Eigen::MatrixXd*>> out;
  out.reserve(mutable_list.size());
  for (auto& [name, ptr] : mutable_list) out.emplace_back(name, ptr);
  return out;
}

namespace {

Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  double keep = 1.0 - rate;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = rng.next_double() < rate ? 0.0 : 1.0 / keep;
    }
  }
  return m;
}

struct GraphOutput {
  autograd::Ptr logits;  // G x 1, pre-squash
  autograd::Tape tape;
};

// Builds the forward graph on the tape. `params` must be leaves created from
// the model tensors in tensors() order.
autograd::Ptr build_forward(autograd::Tape& tape, const std::vector<autograd::Ptr>& p,
                            const SurrogateModel& model, const BatchGraph& batch,
                            bool train_mode, Rng* dropout_rng) {
  using autograd::Ptr;
  const Ptr &w_in = p[0], &b_in = p[1], &w_msg = p[2], &w_atom = p[3], &b_atom = p[4],
            &w_out1 = p[5], &b_out1 = p[6], &w_out2 = p[7], &b_out2 = p[8];

  Ptr nodes = tape.leaf(batch.nodes, false);
  Ptr edge_inputs = tape.leaf(batch.edge_inputs, false);
  int num_nodes = static_cast<int>(batch.nodes.rows());

  Ptr h0 = tape.relu(tape.add_row(tape.matmul(edge_inputs, w_in), b_in));
  Ptr h = h0;
  for (int t = 1; t < model.hp.depth; ++t) {
    // m_uv = sum over edges into u of h, minus the reverse edge
    Ptr in_sum = tape.segment_sum(h, batch.edge_dst, num_nodes);
    Ptr gathered = tape.gather_rows(in_sum, batch.edge_src);
    Ptr rev = tape.gather_rows(h, batch.reverse_edge);
    Ptr m = tape.sub(gathered, rev);
    h = tape.relu(tape.add(h0, tape.matmul(m, w_msg)));
  }

  Ptr node_in = tape.segment_sum(h, batch.edge_dst, num_nodes);
  Ptr node_h = tape.relu(
      tape.add_row(tape.matmul(tape.concat_cols(nodes, node_in), w_atom), b_atom));
  Ptr pooled = tape.segment_sum(node_h, batch.node_graph, batch.num_graphs);

  Ptr z1 = tape.relu(tape.add_row(tape.matmul(pooled, w_out1), b_out1));
  if (train_mode && model.hp.dropout > 0.0 && dropout_rng != nullptr) {
    z1 = tape.mask(z1, dropout_mask(z1->value.rows(), z1->value.cols(), model.hp.dropout,
                                    *dropout_rng));
  }
  return tape.add_row(tape.matmul(z1, w_out2), b_out2);
}

std::vector<autograd::Ptr> param_leaves(autograd::Tape& tape, const SurrogateModel& model,
                                        bool requires_grad) {
  std::vector<autograd::Ptr> out;
  for (auto& [name, mat] : model.tensors()) out.push_back(tape.leaf(*mat, requires_grad));
  return out;
}

}  // namespace

Eigen::VectorXd forward(const SurrogateModel& model, const BatchGraph& batch, bool train_mode,
                        Rng* dropout_rng) {
  if (batch.node_dim != model.schema.node_dim())
    throw MoleculeError("feature dimension mismatch");
  autograd::Tape tape;
  auto params = param_leaves(tape, model, false);
  autograd::Ptr logits = build_forward(tape, params, model, batch, train_mode, dropout_rng);
  Eigen::VectorXd out = logits->value.col(0);
  if (model.task == Task::Classification) {
    out = (1.0 / (1.0 + (-out.array()).exp())).matrix();
  }
  return out;
}

LossGrad loss_and_grad(const SurrogateModel& model, const BatchGraph& batch,
                       const Eigen::VectorXd& targets, Rng* dropout_rng) {
  if (batch.num_graphs == 0) throw TrainError("empty batch");
  if (targets.size() != batch.num_graphs) throw TrainError("target/batch size mismatch");

  autograd::Tape tape;
  auto params = param_leaves(tape, model, true);
  autograd::Ptr logits = build_forward(tape, params, model, batch, true, dropout_rng);

  for (int i = 0; i < batch.num_graphs; ++i) {
    if (!std::isfinite(logits->value(i, 0)))
      throw TrainError("non-finite prediction at record " + std::to_string(i));
  }

  autograd::Ptr loss;
  if (model.task == Task::Regression) {
    autograd::Ptr t = tape.leaf(targets, false);
    loss = tape.mean_square(tape.sub(logits, t));
  } else {
    loss = tape.bce_with_logits(logits, targets);
  }
  if (!std::isfinite(loss->value(0, 0))) throw TrainError("non-finite loss");
  tape.backward(loss);

  LossGrad out;
  out.loss = loss->value(0, 0);
  out.grads.reserve(params.size());
  for (auto& p : params) {
    p->ensure_grad();
    out.grads.push_back(p->grad);
  }
  return out;
}

double predict(const SurrogateModel& model, const Molecule& mol) {
  std::vector<Molecule> one = {mol};
  return predict_batch(model, one)(0);
}

Eigen::VectorXd predict_batch(const SurrogateModel& model, std::span<const Molecule> mols) {
  BatchGraph batch = batch_featurize(mols, model.schema);
  Eigen::VectorXd out = forward(model, batch, /*train_mode=*/false);
  if (model.task == Task::Regression) {
    out = out.cwiseMax(1.0).cwiseMin(11.0);
  }
  return out;
}

namespace {

constexpr int kCheckpointVersion = 1;

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows) {
  if (!rows.is_array() || rows.empty()) throw MoleculeError("corrupt checkpoint tensor");
  Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  Eigen::Index c = static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != c)
      throw MoleculeError("corrupt checkpoint tensor");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

}  // namespace

void save_checkpoint(const SurrogateModel& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format_version"] = kCheckpointVersion;
  j["task"] = task_name(model.task);
  j["hyperparams"] = {{"hidden", model.hp.hidden},
                      {"depth", model.hp.depth},
                      {"dropout", model.hp.dropout}};
  j["schema"] = {{"version", model.schema.version},
                 {"hash", model.schema.hash()},
                 {"node_dim", model.schema.node_dim()},
                 {"edge_dim", model.schema.edge_dim()}};
  nlohmann::json tensors;
  for (auto& [name, mat] : model.tensors()) tensors[name] = matrix_to_json(*mat);
  j["tensors"] = std::move(tensors);

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw MoleculeError("cannot write checkpoint: " + path.string());
  out << j.dump(1) << "\n";
}

SurrogateModel load_checkpoint(const std::filesystem::path& path,
                               std::optional<Task> expected_task) {
  std::ifstream in(path);
  if (!in) throw MoleculeError("cannot read checkpoint: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw MoleculeError("corrupt checkpoint: " + std::string(e.what()));
  }
  if (j.value("format_version", -1) != kCheckpointVersion)
    throw MoleculeError("unsupported checkpoint format version");

  SurrogateModel m;
  std::string task = j.at("task").get<std::string>();
  if (task == "regression") {
    m.task = Task::Regression;
  } else if (task == "classification") {
    m.task = Task::Classification;
  } else {
    throw MoleculeError("unknown checkpoint task: " + task);
  }
  m.hp.hidden = j.at("hyperparams").at("hidden").get<int>();
  m.hp.depth = j.at("hyperparams").at("depth").get<int>();
  m.hp.dropout = j.at("hyperparams").at("dropout").get<double>();
  if (j.at("schema").at("hash").get<std::uint64_t>() != m.schema.hash())
    throw MoleculeError("checkpoint schema hash mismatch");

  for (auto& [name, mat] : m.tensors()) {
    if (!j.at("tensors").contains(name))
      throw MoleculeError("checkpoint missing tensor: " + name);
    *mat = matrix_from_json(j.at("tensors").at(name));
  }
  int nd = m.schema.node_dim(), ed = m.schema.edge_dim(), h = m.hp.hidden;
  if (m.w_in.rows() != nd + ed || m.w_in.cols() != h || m.w_msg.rows() != h ||
      m.w_atom.rows() != nd + h || m.w_out2.cols() != 1)
    throw MoleculeError("checkpoint tensor shapes inconsistent with hyperparameters");
  if (expected_task.has_value() && m.task != *expected_task)
    throw MoleculeError(std::string("checkpoint task mismatch: stored ") +
                        task_name(m.task) + ", expected " + task_name(*expected_task));
  return m;
}

}  // namespace synthweaver
