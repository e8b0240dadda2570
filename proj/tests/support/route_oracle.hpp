//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "synthweaver/planner.hpp"
#include "synthweaver/smiles.hpp"

namespace synthweaver::test {

struct StateLimitExceeded : std::runtime_error {
  StateLimitExceeded() : std::runtime_error("disconnection tree too large") {}
};

// Independent exhaustive route-cost oracle: full memoized enumeration of the
// disconnection tree, one molecule at a time (multiset members decompose
// independently, so per-molecule minima add up). nullopt = unsolvable.
class ExhaustiveRouteOracle {
 public:
  ExhaustiveRouteOracle(const Catalog& catalog,
                        const std::vector<DisconnectionTemplate>& templates,
                        int state_limit = 500)
      : catalog_(catalog), templates_(templates), state_limit_(state_limit) {}

  std::optional<double> min_cost(const Molecule& mol) {
    std::string canon = write_smiles(mol);
    auto it = memo_.find(canon);
    if (it != memo_.end()) return it->second;
    if (static_cast<int>(memo_.size()) >= state_limit_) throw StateLimitExceeded();
    // mark before recursing; acyclic decomposition cannot revisit (parts are
    // strictly smaller), so the placeholder is never read
    memo_[canon] = std::nullopt;

    std::optional<double> best;
    if (auto price = catalog_.price(canon)) {
      best = *price;
    } else {
      for (const TemplateMatch& match : match_templates(mol, templates_)) {
        auto [pa, pb] = cut_bond(mol, match.bond);
        auto ca = min_cost(pa);
        if (!ca) continue;
        auto cb = min_cost(pb);
        if (!cb) continue;
        double total = match.tmpl->step_cost() + *ca + *cb;
        if (!best || total < *best) best = total;
      }
    }
    memo_[canon] = best;
    return best;
  }

  int distinct_molecules() const { return static_cast<int>(memo_.size()); }

 private:
  const Catalog& catalog_;
  const std::vector<DisconnectionTemplate>& templates_;
  int state_limit_;
  std::map<std::string, std::optional<double>> memo_;
};

}  // namespace synthweaver::test
