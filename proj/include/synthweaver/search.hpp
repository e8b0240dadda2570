//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <filesystem>
#include <map>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "synthweaver/actions.hpp"
#include "synthweaver/oracle.hpp"
#include "synthweaver/scoring.hpp"

namespace synthweaver {

// Boltzmann selection probabilities: P_i proportional to exp(q_i / tau),
// computed with a max shift for overflow safety. Throws on empty q.
std::vector<double> softmax_probs(std::span<const double> q, double tau);

struct RunConfig {
  double tau = 0.15;
  int steps = 200;
  int n_init = 20;
  int n_trajectories = 1;
  std::uint64_t seed = 0;
  int top_k = 100;
  int action_cap = 2000;  // larger legal-action sets are uniformly subsampled
  int workers = 1;
};

struct TrajectoryRecord {
  int step = 0;
  std::string smiles;  // canonical
  ScoreBundle bundle;
  std::string action;    // action chosen at this state; empty on the last record
  int action_count = 0;  // legal actions available at this state
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  bool dead_end = false;
  long visited = 0;  // molecules scored while producing this trajectory
  std::vector<std::pair<long, double>> best_events;  // (visited count, new best)
};

struct TopEntry {
  std::string smiles;
  ScoreBundle bundle;
  double oracle_score = std::numeric_limits<double>::quiet_NaN();
  bool has_oracle = false;
};

struct SearchReport {
  std::vector<Trajectory> trajectories;
  std::vector<TopEntry> top;  // ascending by (combined, synth_raw, smiles)
  std::vector<std::pair<long, double>> best_curve;  // (visited, best combined)
  long total_visited = 0;
  long parse_errors = 0;  // screen_library only
};

// Bounded best-k accumulator with canonical-SMILES deduplication. Ordering
// key is (combined, synth_raw, smiles); ties at combined == 0 rank by the
// raw synthesizability score.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) {}
  void offer(const Molecule& mol, const ScoreBundle& bundle);
  void offer(std::string smiles, const ScoreBundle& bundle);
  void merge(const TopK& other);
  std::vector<TopEntry> sorted() const;
  std::size_t size() const { return entries_.size(); }

 private:
  struct Key {
    double combined;
    double synth_raw;
    std::string smiles;
    bool operator<(const Key& o) const {
      if (combined != o.combined) return combined < o.combined;
      if (synth_raw != o.synth_raw) return synth_raw < o.synth_raw;
      return smiles < o.smiles;
    }
  };
  bool above_threshold(double combined, double synth_raw) const;
  std::size_t k_;
  std::map<Key, ScoreBundle> entries_;
};

// One softmax-selection trajectory: enumerate, score every successor, sample
// by exp(-combined/tau), repeat. Deterministic given the rng state.
Trajectory run_trajectory(const SearchSpace& space, const CombinedScorer& scorer,
                          const RunConfig& cfg, Rng& rng);

// n_trajectories independent softmax trajectories with per-trajectory seeds
// derived from cfg.seed; the report is identical for any worker count.
SearchReport run_search(const SearchSpace& space, const CombinedScorer& scorer,
                        const RunConfig& cfg);

// Random-walk generation: uniform action choice, only visited states scored.
SearchReport random_walk_baseline(const SearchSpace& space, const CombinedScorer& scorer,
                                  const RunConfig& cfg);

// Scores every parseable line of a SMILES list file ("SMILES[<TAB>name]",
// '#' comments); streaming with memory bounded by top_k, unparseable lines
// counted, not fatal.
SearchReport screen_library(const std::filesystem::path& path, const CombinedScorer& scorer,
                            const RunConfig& cfg);

// Fills TopEntry::oracle_score for every report row.
void relabel_with_oracle(SearchReport& report, const SynthOracle& oracle, ScoreCache& cache,
                         int workers = 1);

}  // namespace synthweaver
