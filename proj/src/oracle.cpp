//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "synthweaver/parallel.hpp"
#include "synthweaver/smiles.hpp"

namespace synthweaver {

SynthCost SynthOracle::score_route(const RouteResult& route) const {
  if (!route.solved) return SynthCost{kNoRouteScore};
  double prices = 0.0;
  for (const auto& [smi, p] : route.leaf_costs) prices += p;
  double v = 1.0 + cfg_.alpha * static_cast<double>(route.steps.size()) +
             cfg_.beta * std::log1p(prices);
  return SynthCost{std::clamp(v, 1.0, 10.0)};
}

SynthCost SynthOracle::score(const Molecule& mol) const {
  return score_route(planner_.plan(mol));
}

ScoreCache ScoreCache::load(const std::filesystem::path& path) {
  ScoreCache cache;
  if (!std::filesystem::exists(path)) return cache;
  std::ifstream in(path);
  if (!in) throw MoleculeError("cannot read cache store: " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "smiles,score") continue;
    std::size_t comma = line.rfind(',');
    if (comma == std::string::npos)
      throw MoleculeError(path.string() + ":" + std::to_string(line_no) +
                          ": malformed cache row");
    try {
      cache.entries_[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw MoleculeError(path.string() + ":" + std::to_string(line_no) +
                          ": malformed cache row");
    }
  }
  return cache;
}

void ScoreCache::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw MoleculeError("cannot write cache store: " + path.string());
  out << "smiles,score\n";
  char buf[64];
  for (const auto& [smi, score] : entries_) {
    std::snprintf(buf, sizeof buf, "%.17g", score);
    out << smi << "," << buf << "\n";
  }
}

std::optional<double> ScoreCache::find(const std::string& canonical) const {
  auto it = entries_.find(canonical);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ScoreCache::insert(const std::string& canonical, double score) {
  entries_[canonical] = score;
}

std::vector<LabeledRow> label_batch(const SynthOracle& oracle,
                                    const std::vector<Molecule>& mols, ScoreCache& cache,
                                    int workers) {
  std::vector<std::string> canon(mols.size());
  for (std::size_t i = 0; i < mols.size(); ++i) canon[i] = write_smiles(mols[i]);

  // unique molecules not yet cached, in first-appearance order
  std::vector<int> todo;
  {
    std::map<std::string, bool> seen;
    for (std::size_t i = 0; i < mols.size(); ++i) {
      if (cache.find(canon[i]).has_value()) continue;
      if (seen.emplace(canon[i], true).second) todo.push_back(static_cast<int>(i));
    }
  }

  std::vector<double> scores(todo.size());
  parallel_for(static_cast<int>(todo.size()), workers, [&](int k) {
    scores[k] = oracle.score(mols[todo[k]]).value;
  });
  for (std::size_t k = 0; k < todo.size(); ++k) cache.insert(canon[todo[k]], scores[k]);

  std::vector<LabeledRow> out(mols.size());
  for (std::size_t i = 0; i < mols.size(); ++i) {
    out[i] = LabeledRow{canon[i], *cache.find(canon[i])};
  }
  return out;
}

}  // namespace synthweaver
