//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "synthweaver/actions.hpp"
#include "synthweaver/metrics.hpp"
#include "synthweaver/oracle.hpp"
#include "synthweaver/train.hpp"

namespace synthweaver {

struct TimingStats {
  double mean = 0.0;    // seconds per item
  double median = 0.0;
  double p95 = 0.0;
  int items = 0;
  double speedup = 0.0;  // reference mean / subject mean; 0 when unset
};

// Wall-clock per-item statistics after 5 warm-up calls. Requires at least 30
// molecules.
TimingStats benchmark(const std::function<void(const Molecule&)>& score_fn,
                      std::span<const Molecule> mols);

// reference mean / subject mean
double speedup_ratio(const TimingStats& subject, const TimingStats& reference);

struct FidelityConfig {
  int n = 5000;  // sampled molecules; at least 1000
  int n_init = 20;
  TrainConfig train;  // task fields are overridden per run
  int workers = 1;
};

struct FidelityReport {
  TrainReport regression;      // fold/pooled R^2 on the oracle score
  TrainReport classification;  // fold/pooled AUC on route existence
  // scatter data: oracle score vs pooled holdout surrogate prediction
  std::vector<double> oracle_scores;
  std::vector<double> surrogate_scores;
  int sampled = 0;
  int unsolvable = 0;  // oracle score 11 among the samples
};

// Samples molecules from the space, labels them with the oracle (cached),
// then cross-validates regression and classification surrogates.
FidelityReport fidelity_experiment(const SearchSpace& space, const SynthOracle& oracle,
                                   const FidelityConfig& cfg, ScoreCache& cache);

struct FileEvalReport {
  double r2 = 0.0;
  bool r2_valid = false;
  int scored = 0;
  int parse_errors = 0;
  std::vector<double> oracle_scores;
  std::vector<double> surrogate_scores;
};

// Out-of-distribution check: oracle-labels the molecules of a SMILES file
// and compares the trained model's predictions against them.
FileEvalReport evaluate_on_file(const SurrogateModel& model, const SynthOracle& oracle,
                                const std::filesystem::path& smiles_file, ScoreCache& cache,
                                int workers = 1);

}  // namespace synthweaver
