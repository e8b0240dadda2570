//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "support/gradcheck.hpp"
#include "support/testutil.hpp"
#include "synthweaver/features.hpp"
#include "synthweaver/mpnn.hpp"
#include "synthweaver/smiles.hpp"
#include "synthweaver/train.hpp"

using namespace synthweaver;
using synthweaver::test::gradcheck;
using synthweaver::test::permuted;
using synthweaver::test::random_permutation;

namespace {

SurrogateModel small_model(Task task, std::uint64_t seed = 3) {
  return SurrogateModel::init(Hyperparams{8, 2, 0.0}, task, seed);
}

std::vector<Molecule> mols(std::initializer_list<const char*> smis) {
  std::vector<Molecule> out;
  for (const char* s : smis) out.push_back(parse_smiles(s));
  return out;
}

}  // namespace

TEST_CASE("featurize: shapes and symmetry") {
  FeatureSchema schema;
  GraphFeatures methane = featurize(parse_smiles("C"), schema);
  CHECK(methane.nodes.rows() == 1);
  CHECK(methane.nodes.cols() == schema.node_dim());
  CHECK(methane.edge_src.empty());

  GraphFeatures ethane = featurize(parse_smiles("CC"), schema);
  CHECK(ethane.nodes.rows() == 2);
  CHECK(ethane.edge_src.size() == 2);
  CHECK(ethane.reverse_edge[0] == 1);
  CHECK(ethane.reverse_edge[1] == 0);

  GraphFeatures benzene = featurize(parse_smiles("c1ccccc1"), schema);
  for (int i = 1; i < 6; ++i) {
    CHECK((benzene.nodes.row(i) - benzene.nodes.row(0)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("forward: zero weights reduce to the head bias") {
  SurrogateModel m = small_model(Task::Regression);
  for (auto& [name, mat] : m.tensors()) mat->setZero();
  m.b_out2(0, 0) = 2.5;
  auto batch = batch_featurize(mols({"CCO", "c1ccccc1"}), m.schema);
  Eigen::VectorXd out = forward(m, batch, false);
  CHECK(out(0) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(out(1) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("forward: permutation invariance and determinism") {
  SurrogateModel m = small_model(Task::Regression, 17);
  Molecule mol = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  double base = predict(m, mol);
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    Molecule p = permuted(mol, random_permutation(mol.atom_count(), rng));
    CHECK(predict(m, p) == doctest::Approx(base).epsilon(1e-9));
  }
  // inference is exactly repeatable
  CHECK(predict(m, mol) == base);
}

TEST_CASE("loss: exact-fit batch has zero loss and zero gradients") {
  SurrogateModel m = small_model(Task::Regression, 11);
  auto batch = batch_featurize(mols({"CCO", "CCN", "CCC"}), m.schema);
  Eigen::VectorXd self = forward(m, batch, false);
  LossGrad lg = loss_and_grad(m, batch, self, nullptr);
  CHECK(lg.loss == doctest::Approx(0.0).epsilon(1e-18));
  for (const auto& g : lg.grads) {
    CHECK(g.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("loss: classification at p=0.5 costs ln 2") {
  SurrogateModel m = small_model(Task::Classification);
  for (auto& [name, mat] : m.tensors()) mat->setZero();  // logits 0 -> p = 0.5
  auto batch = batch_featurize(mols({"CCO"}), m.schema);
  Eigen::VectorXd one(1);
  one << 1.0;
  LossGrad lg = loss_and_grad(m, batch, one, nullptr);
  CHECK(lg.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("gradients match central finite differences") {
  auto batch_mols = mols({"CC(=O)N", "c1ccncc1", "CCO"});
  FeatureSchema schema;
  BatchGraph batch = batch_featurize(batch_mols, schema);

  SurrogateModel reg = small_model(Task::Regression, 23);
  Eigen::VectorXd targets(3);
  targets << 2.0, 11.0, 1.5;
  auto res = gradcheck(reg, batch, targets);
  CHECK(res.entries > 500);
  CHECK(res.max_rel_err < 1e-4);

  SurrogateModel cls = small_model(Task::Classification, 29);
  Eigen::VectorXd labels(3);
  labels << 1.0, 0.0, 1.0;
  auto res2 = gradcheck(cls, batch, labels);
  CHECK(res2.max_rel_err < 1e-4);
}

TEST_CASE("dropout: stochastic average approaches the deterministic pass") {
  SurrogateModel m = SurrogateModel::init(Hyperparams{16, 2, 0.3}, Task::Regression, 41);
  auto batch = batch_featurize(mols({"CC(=O)Oc1ccccc1"}), m.schema);
  double det = forward(m, batch, false)(0);
  Rng rng(99);
  int n = 20000;
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < n; ++t) {
    double v = forward(m, batch, true, &rng)(0);
    sum += v;
    sum_sq += v * v;
  }
  double mean = sum / n;
  double var = std::max(0.0, sum_sq / n - mean * mean);
  double stderr_mc = std::sqrt(var / n);
  CHECK(std::abs(mean - det) < 5.0 * stderr_mc + 1e-9);
}

TEST_CASE("train: linear teacher is learnable to R^2 >= 0.99") {
  // score is an affine function of the heavy-atom count
  Dataset data;
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    int len = rng.next_int(1, 24);
    data.mols.push_back(parse_smiles(std::string(static_cast<std::size_t>(len), 'C')));
    data.scores.push_back(1.0 + 0.3 * len);
  }
  TrainConfig cfg;
  cfg.hp = {24, 2, 0.0};
  cfg.task = Task::Regression;
  cfg.epochs = 60;
  cfg.batch_size = 64;
  cfg.lr = 3e-3;
  cfg.seed = 5;
  cfg.k_folds = 2;
  cfg.patience = 0;
  cfg.workers = 2;
  TrainOutput out = train(cfg, data);
  REQUIRE(out.report.pooled_valid);
  CHECK(out.report.pooled_holdout >= 0.99);
  CHECK_FALSE(out.report.aborted);
}

TEST_CASE("train: degenerate constant dataset reports not-applicable") {
  Dataset data;
  for (int i = 0; i < 40; ++i) {
    data.mols.push_back(parse_smiles("CCO"));
    data.scores.push_back(3.0);
  }
  TrainConfig cfg;
  cfg.hp = {8, 2, 0.0};
  cfg.epochs = 2;
  cfg.k_folds = 2;
  cfg.seed = 1;
  TrainOutput out = train(cfg, data);
  CHECK_FALSE(out.report.pooled_valid);
  CHECK(!out.report.warning.empty());
  for (const FoldMetric& fm : out.report.fold_metrics) CHECK_FALSE(fm.valid);
}

TEST_CASE("train: identical seeds give identical weights") {
  Dataset data;
  Rng rng(13);
  for (int i = 0; i < 60; ++i) {
    int len = rng.next_int(1, 10);
    data.mols.push_back(parse_smiles(std::string(static_cast<std::size_t>(len), 'C')));
    data.scores.push_back(2.0 + 0.5 * len);
  }
  TrainConfig cfg;
  cfg.hp = {8, 2, 0.05};
  cfg.epochs = 4;
  cfg.k_folds = 2;
  cfg.seed = 77;
  TrainOutput a = train(cfg, data);
  TrainOutput b = train(cfg, data);
  auto ta = a.model.tensors();
  auto tb = b.model.tensors();
  for (std::size_t i = 0; i < ta.size(); ++i) {
    CHECK((*ta[i].second - *tb[i].second).cwiseAbs().maxCoeff() == 0.0);
  }
  // worker count must not change the result either
  cfg.workers = 3;
  TrainOutput c = train(cfg, data);
  auto tc = c.model.tensors();
  for (std::size_t i = 0; i < ta.size(); ++i) {
    CHECK((*ta[i].second - *tc[i].second).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("predict: clamped to [1,11] for regression") {
  SurrogateModel m = small_model(Task::Regression);
  for (auto& [name, mat] : m.tensors()) mat->setZero();
  m.b_out2(0, 0) = 99.0;
  CHECK(predict(m, parse_smiles("C")) == doctest::Approx(11.0));
  m.b_out2(0, 0) = -99.0;
  CHECK(predict(m, parse_smiles("C")) == doctest::Approx(1.0));
}

TEST_CASE("checkpoint: round trip, tamper detection, task mismatch") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "synthweaver_ckpt_test";
  fs::create_directories(dir);
  fs::path file = dir / "model.json";

  SurrogateModel m = small_model(Task::Regression, 55);
  Molecule probe = parse_smiles("CC(=O)Oc1ccccc1");
  double before = predict(m, probe);
  save_checkpoint(m, file);
  SurrogateModel back = load_checkpoint(file);
  CHECK(predict(back, probe) == before);  // bit-identical

  // tampered schema hash
  {
    nlohmann::json j;
    std::ifstream(file) >> j;
    j["schema"]["hash"] = 12345u;
    std::ofstream(dir / "tampered.json") << j.dump();
    CHECK_THROWS_AS(load_checkpoint(dir / "tampered.json"), MoleculeError);
  }
  // task mismatch
  CHECK_THROWS_AS(load_checkpoint(file, Task::Classification), MoleculeError);
  CHECK(load_checkpoint(file, Task::Regression).task == Task::Regression);
  // corrupt file
  std::ofstream(dir / "garbage.json") << "{not json";
  CHECK_THROWS_AS(load_checkpoint(dir / "garbage.json"), MoleculeError);
  fs::remove_all(dir);
}
