//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synthweaver/planner.hpp"

namespace synthweaver {

inline constexpr double kNoRouteScore = 11.0;

// Synthesizability cost in [1,10]; exactly 11 means no route was found.
struct SynthCost {
  double value = kNoRouteScore;
  bool unsolved() const { return value >= kNoRouteScore; }
};

struct OracleConfig {
  double alpha = 0.8;  // per-step weight
  double beta = 0.5;   // log leaf-price weight
};

// Ground-truth synthesizability scorer backed by the route planner. Solved
// routes map to clamp(1 + alpha*steps + beta*ln(1 + sum leaf prices), 1, 10);
// unsolved molecules score 11.
class SynthOracle {
 public:
  SynthOracle(RoutePlanner planner, OracleConfig cfg = {})
      : planner_(std::move(planner)), cfg_(cfg) {}

  SynthCost score(const Molecule& mol) const;
  SynthCost score_route(const RouteResult& route) const;
  const RoutePlanner& planner() const { return planner_; }
  const OracleConfig& config() const { return cfg_; }

 private:
  RoutePlanner planner_;
  OracleConfig cfg_;
};

// Persistent oracle-score cache keyed by canonical SMILES. A missing file is
// an empty cache; an unreadable or malformed file is an error.
class ScoreCache {
 public:
  ScoreCache() = default;
  static ScoreCache load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::optional<double> find(const std::string& canonical) const;
  void insert(const std::string& canonical, double score);
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, double> entries_;
};

struct LabeledRow {
  std::string smiles;  // canonical
  double score = kNoRouteScore;
};

// Labels molecules with the oracle, using and filling the cache. Output rows
// match the input order; duplicate molecules cost one planner call. Planner
// calls fan out over `workers` threads with worker-count-independent results.
std::vector<LabeledRow> label_batch(const SynthOracle& oracle,
                                    const std::vector<Molecule>& mols, ScoreCache& cache,
                                    int workers = 1);

}  // namespace synthweaver
