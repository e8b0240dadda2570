//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/evalkit.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <fstream>

#include "synthweaver/parallel.hpp"
#include "synthweaver/smiles.hpp"

namespace synthweaver {

TimingStats benchmark(const std::function<void(const Molecule&)>& score_fn,
                      std::span<const Molecule> mols) {
  if (mols.size() < 30) throw MetricError("benchmark needs at least 30 molecules");
  using clock = std::chrono::steady_clock;
  for (std::size_t i = 0; i < 5; ++i) score_fn(mols[i % mols.size()]);

  std::vector<double> times;
  times.reserve(mols.size());
  for (const Molecule& m : mols) {
    auto t0 = clock::now();
    score_fn(m);
    auto t1 = clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  TimingStats s;
  s.items = static_cast<int>(times.size());
  s.mean = std::accumulate(times.begin(), times.end(), 0.0) / times.size();
  std::sort(times.begin(), times.end());
  s.median = times[times.size() / 2];
  s.p95 = times[static_cast<std::size_t>(0.95 * (times.size() - 1))];
  return s;
}

double speedup_ratio(const TimingStats& subject, const TimingStats& reference) {
  if (subject.mean <= 0.0) throw MetricError("subject mean must be positive");
  return reference.mean / subject.mean;
}

FidelityReport fidelity_experiment(const SearchSpace& space, const SynthOracle& oracle,
                                   const FidelityConfig& cfg, ScoreCache& cache) {
  if (cfg.n < 1000) throw MetricError("fidelity experiment needs n >= 1000");

  FidelityReport report;
  // deterministic sampling: one derived stream per molecule index
  std::vector<Molecule> mols(cfg.n);
  parallel_for(cfg.n, cfg.workers, [&](int i) {
    Rng rng(Rng::derive(cfg.train.seed, 0x5a3f0000ull + static_cast<std::uint64_t>(i)));
    mols[i] = random_molecule(space, rng, cfg.n_init);
  });

  std::vector<LabeledRow> rows = label_batch(oracle, mols, cache, cfg.workers);
  Dataset data;
  data.mols = std::move(mols);
  data.scores.reserve(rows.size());
  for (const LabeledRow& r : rows) {
    data.scores.push_back(r.score);
    if (r.score >= kNoRouteScore) ++report.unsolvable;
  }
  report.sampled = cfg.n;

  TrainConfig reg_cfg = cfg.train;
  reg_cfg.task = Task::Regression;
  reg_cfg.workers = cfg.workers;
  TrainOutput reg = train(reg_cfg, data);
  report.regression = reg.report;
  report.oracle_scores = reg.report.holdout_true;
  report.surrogate_scores = reg.report.holdout_pred;

  TrainConfig cls_cfg = cfg.train;
  cls_cfg.task = Task::Classification;
  cls_cfg.workers = cfg.workers;
  TrainOutput cls = train(cls_cfg, data);
  report.classification = cls.report;
  return report;
}

FileEvalReport evaluate_on_file(const SurrogateModel& model, const SynthOracle& oracle,
                                const std::filesystem::path& smiles_file, ScoreCache& cache,
                                int workers) {
  std::ifstream in(smiles_file);
  if (!in) throw MoleculeError("cannot open SMILES list: " + smiles_file.string());
  FileEvalReport report;
  std::vector<Molecule> mols;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    std::string token = line.substr(start);
    if (std::size_t ws = token.find_first_of(" \t"); ws != std::string::npos)
      token = token.substr(0, ws);
    try {
      mols.push_back(parse_smiles(token));
    } catch (const MoleculeError&) {
      ++report.parse_errors;
    }
  }
  std::vector<LabeledRow> rows = label_batch(oracle, mols, cache, workers);
  Eigen::VectorXd pred = predict_batch(model, mols);
  report.scored = static_cast<int>(mols.size());
  for (std::size_t i = 0; i < mols.size(); ++i) {
    report.oracle_scores.push_back(rows[i].score);
    report.surrogate_scores.push_back(pred(static_cast<Eigen::Index>(i)));
  }
  try {
    report.r2 = r_squared(report.oracle_scores, report.surrogate_scores);
    report.r2_valid = true;
  } catch (const MetricError&) {
    report.r2_valid = false;
  }
  return report;
}

}  // namespace synthweaver
