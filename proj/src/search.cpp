//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/search.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "synthweaver/parallel.hpp"
#include "synthweaver/smiles.hpp"

namespace synthweaver {

std::vector<double> softmax_probs(std::span<const double> q, double tau) {
  if (q.empty()) throw MoleculeError("softmax over an empty action set");
  if (!(tau > 0.0)) throw MoleculeError("temperature must be positive");
  double best = *std::max_element(q.begin(), q.end());
  std::vector<double> p(q.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    p[i] = std::exp((q[i] - best) / tau);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return p;
}

bool TopK::above_threshold(double combined, double synth_raw) const {
  if (entries_.size() < k_) return true;
  const Key& worst = entries_.rbegin()->first;
  if (combined != worst.combined) return combined < worst.combined;
  if (synth_raw != worst.synth_raw) return synth_raw < worst.synth_raw;
  return true;  // tie on both numbers: the smiles comparison decides later
}

void TopK::offer(const Molecule& mol, const ScoreBundle& bundle) {
  if (k_ == 0) return;
  if (!above_threshold(bundle.combined, bundle.synth_raw)) return;
  offer(write_smiles(mol), bundle);
}

void TopK::offer(std::string smiles, const ScoreBundle& bundle) {
  if (k_ == 0) return;
  if (!above_threshold(bundle.combined, bundle.synth_raw)) return;
  Key key{bundle.combined, bundle.synth_raw, std::move(smiles)};
  if (entries_.size() == k_ && entries_.rbegin()->first < key) return;
  auto [it, inserted] = entries_.emplace(std::move(key), bundle);
  if (!inserted) return;  // same molecule at the same score
  if (entries_.size() > k_) entries_.erase(std::prev(entries_.end()));
}

void TopK::merge(const TopK& other) {
  for (const auto& [key, bundle] : other.entries_) offer(key.smiles, bundle);
}

std::vector<TopEntry> TopK::sorted() const {
  std::vector<TopEntry> out;
  out.reserve(entries_.size());
  for (const auto& [key, bundle] : entries_) {
    TopEntry e;
    e.smiles = key.smiles;
    e.bundle = bundle;
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

// uniform subsample without replacement, preserving enumeration order
template <typename T>
void cap_actions(std::vector<T>& items, int cap, Rng& rng) {
  if (cap <= 0 || static_cast<int>(items.size()) <= cap) return;
  std::vector<int> idx(items.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < cap; ++i) {
    int j = i + static_cast<int>(rng.next_below(idx.size() - static_cast<std::size_t>(i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  std::vector<T> kept;
  kept.reserve(static_cast<std::size_t>(cap));
  for (int i : idx) kept.push_back(std::move(items[static_cast<std::size_t>(i)]));
  items = std::move(kept);
}

int sample_index(std::span<const double> probs, Rng& rng) {
  double r = rng.next_double();
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (r < cum) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

struct TrajectoryScratch {
  Trajectory traj;
  TopK top;
  double best = std::numeric_limits<double>::infinity();

  explicit TrajectoryScratch(std::size_t k) : top(k) {}

  void note(const Molecule& mol, const ScoreBundle& bundle) {
    ++traj.visited;
    if (bundle.combined < best) {
      best = bundle.combined;
      traj.best_events.emplace_back(traj.visited, best);
    }
    top.offer(mol, bundle);
  }
};

// Shared trajectory engine. Softmax mode scores every successor; uniform
// mode (the random-walk baseline) scores only the state it moves to.
void run_trajectory_impl(const SearchSpace& space, const CombinedScorer& scorer,
                         const RunConfig& cfg, Rng& rng, TrajectoryScratch& scratch,
                         bool uniform) {
  Trajectory& traj = scratch.traj;
  Molecule mol = random_molecule(space, rng, cfg.n_init);
  {
    ScoreBundle bundle = scorer.score(mol);
    scratch.note(mol, bundle);
    TrajectoryRecord rec;
    rec.step = 0;
    rec.smiles = write_smiles(mol);
    rec.bundle = bundle;
    traj.records.push_back(std::move(rec));
  }

  for (int t = 1; t <= cfg.steps; ++t) {
    auto successors = enumerate_with_results(space, mol);
    int legal = static_cast<int>(successors.size());
    if (successors.empty()) {
      traj.dead_end = true;
      break;
    }
    cap_actions(successors, cfg.action_cap, rng);

    int pick = -1;
    ScoreBundle picked;
    if (uniform) {
      pick = static_cast<int>(rng.next_below(successors.size()));
      picked = scorer.score(successors[static_cast<std::size_t>(pick)].second);
      scratch.note(successors[static_cast<std::size_t>(pick)].second, picked);
    } else {
      std::vector<Molecule> mols;
      mols.reserve(successors.size());
      for (auto& [a, m] : successors) mols.push_back(m);
      std::vector<ScoreBundle> bundles = scorer.score_batch(mols);
      std::vector<double> q(bundles.size());
      for (std::size_t i = 0; i < bundles.size(); ++i) {
        scratch.note(mols[i], bundles[i]);
        q[i] = -bundles[i].combined;
      }
      pick = sample_index(softmax_probs(q, cfg.tau), rng);
      picked = bundles[static_cast<std::size_t>(pick)];
    }

    mol = std::move(successors[static_cast<std::size_t>(pick)].second);
    TrajectoryRecord rec;
    rec.step = t;
    rec.smiles = write_smiles(mol);
    rec.bundle = picked;
    rec.action = successors[static_cast<std::size_t>(pick)].first.to_string();
    rec.action_count = legal;
    traj.records.push_back(std::move(rec));
  }
}

SearchReport reduce_trajectories(std::vector<TrajectoryScratch>&& parts, std::size_t k) {
  SearchReport report;
  TopK top(k);
  double best = std::numeric_limits<double>::infinity();
  long offset = 0;
  for (TrajectoryScratch& part : parts) {
    for (auto [visited, value] : part.traj.best_events) {
      if (value < best) {
        best = value;
        report.best_curve.emplace_back(offset + visited, best);
      }
    }
    offset += part.traj.visited;
    report.total_visited += part.traj.visited;
    top.merge(part.top);
    report.trajectories.push_back(std::move(part.traj));
  }
  report.top = top.sorted();
  return report;
}

SearchReport run_selection(const SearchSpace& space, const CombinedScorer& scorer,
                           const RunConfig& cfg, bool uniform) {
  std::vector<TrajectoryScratch> parts;
  parts.reserve(static_cast<std::size_t>(cfg.n_trajectories));
  for (int i = 0; i < cfg.n_trajectories; ++i)
    parts.emplace_back(static_cast<std::size_t>(cfg.top_k));
  parallel_for(cfg.n_trajectories, cfg.workers, [&](int i) {
    Rng rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(i)));
    run_trajectory_impl(space, scorer, cfg, rng, parts[static_cast<std::size_t>(i)], uniform);
  });
  return reduce_trajectories(std::move(parts), static_cast<std::size_t>(cfg.top_k));
}

}  // namespace

Trajectory run_trajectory(const SearchSpace& space, const CombinedScorer& scorer,
                          const RunConfig& cfg, Rng& rng) {
  TrajectoryScratch scratch(static_cast<std::size_t>(cfg.top_k));
  run_trajectory_impl(space, scorer, cfg, rng, scratch, /*uniform=*/false);
  return std::move(scratch.traj);
}

SearchReport run_search(const SearchSpace& space, const CombinedScorer& scorer,
                        const RunConfig& cfg) {
  return run_selection(space, scorer, cfg, /*uniform=*/false);
}

SearchReport random_walk_baseline(const SearchSpace& space, const CombinedScorer& scorer,
                                  const RunConfig& cfg) {
  return run_selection(space, scorer, cfg, /*uniform=*/true);
}

SearchReport screen_library(const std::filesystem::path& path, const CombinedScorer& scorer,
                            const RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw MoleculeError("cannot open SMILES list: " + path.string());

  SearchReport report;
  TopK top(static_cast<std::size_t>(cfg.top_k));
  double best = std::numeric_limits<double>::infinity();
  std::vector<Molecule> batch;
  constexpr std::size_t kBatch = 256;

  auto flush = [&] {
    if (batch.empty()) return;
    std::vector<ScoreBundle> bundles = scorer.score_batch(batch);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      ++report.total_visited;
      if (bundles[i].combined < best) {
        best = bundles[i].combined;
        report.best_curve.emplace_back(report.total_visited, best);
      }
      top.offer(batch[i], bundles[i]);
    }
    batch.clear();
  };

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
      batch.push_back(parse_smiles(token));
    } catch (const MoleculeError&) {
      ++report.parse_errors;
      continue;
    }
    if (batch.size() >= kBatch) flush();
  }
  flush();
  report.top = top.sorted();
  return report;
}

void relabel_with_oracle(SearchReport& report, const SynthOracle& oracle, ScoreCache& cache,
                         int workers) {
  std::vector<Molecule> mols;
  mols.reserve(report.top.size());
  for (const TopEntry& e : report.top) mols.push_back(parse_smiles(e.smiles));
  std::vector<LabeledRow> rows = label_batch(oracle, mols, cache, workers);
  for (std::size_t i = 0; i < report.top.size(); ++i) {
    report.top[i].oracle_score = rows[i].score;
    report.top[i].has_oracle = true;
  }
}

}  // namespace synthweaver
