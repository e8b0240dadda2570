//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synthweaver/molecule.hpp"

namespace synthweaver {

// Purchasable starting materials: canonical SMILES -> price.
class Catalog {
 public:
  static Catalog load(const std::filesystem::path& path);
  void add(const Molecule& mol, double price);
  bool contains(const std::string& canonical) const { return entries_.count(canonical) > 0; }
  std::optional<double> price(const std::string& canonical) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, double>& entries() const { return entries_; }
  // strictly below the cheapest per-atom price; used as the admissible
  // search heuristic coefficient
  double price_per_atom_bound() const;

 private:
  std::map<std::string, double> entries_;
  std::map<std::string, int> heavy_;
};

// One retro-disconnection rule: an acyclic single bond between two elements,
// optionally constrained by the chemical environment of the first endpoint,
// with a fixed feasibility in (0, 1]. Step cost is 1 - ln(feasibility).
struct DisconnectionTemplate {
  enum class Env {
    None,               // no constraint
    CarbonylCarbon,     // endpoint A is a carbon double-bonded to oxygen
    PlainCarbon,        // endpoint A is a carbon with no double-bonded oxygen
    SulfonylSulfur,     // endpoint A is a sulfur with a double-bonded oxygen
    BothAromatic,       // both endpoints aromatic
  };
  std::string name;
  Element elem_a = Element::C;
  Element elem_b = Element::C;
  Env env = Env::None;
  double feasibility = 1.0;
  double step_cost() const;
};

const std::vector<DisconnectionTemplate>& default_templates();

struct TemplateMatch {
  int bond;
  const DisconnectionTemplate* tmpl;
};

// All (acyclic single bond, template) pairs matching the molecule, in
// (bond, template) order.
std::vector<TemplateMatch> match_templates(const Molecule& mol,
                                           const std::vector<DisconnectionTemplate>& templates);

// Cuts an acyclic single bond, returning the two sanitized parts
// (side of bond.a first).
std::pair<Molecule, Molecule> cut_bond(const Molecule& mol, int bond);

struct RouteStep {
  std::string template_name;
  std::string target;  // canonical SMILES of the molecule being cut
  std::string part_a;
  std::string part_b;
};

struct RouteResult {
  bool solved = false;
  std::vector<RouteStep> steps;
  std::vector<std::pair<std::string, double>> leaf_costs;  // (smiles, price)
  int nodes_expanded = 0;
  double total_cost = 0.0;  // step costs plus leaf prices
};

// Plain-text route tree, one disconnection per line, indented by depth.
std::string format_route_tree(const RouteResult& route);

// Deterministic best-first retro planner. States are multisets of molecules
// still to be made; a state is solved when every member is purchasable.
// Catalog members are never expanded further. Per-molecule disconnection
// sets are memoized across plan() calls (thread-safe).
class RoutePlanner {
 public:
  RoutePlanner(Catalog catalog, std::vector<DisconnectionTemplate> templates,
               int node_budget = 10000);

  RouteResult plan(const Molecule& mol) const;
  const Catalog& catalog() const { return catalog_; }
  const std::vector<DisconnectionTemplate>& templates() const { return templates_; }
  int node_budget() const { return node_budget_; }

 private:
  struct Expansion {
    std::string template_name;
    double step_cost;
    std::string part_a, part_b;
  };
  struct MoleculeInfo {
    std::vector<Expansion> expansions;
    int heavy_atoms = 0;
    bool in_catalog = false;
    double price = 0.0;
    // not purchasable and no disconnection applies: a state containing such
    // a member can never reach the goal
    bool dead = false;
  };
  const MoleculeInfo& info_for(const std::string& canonical, const Molecule* mol) const;

  struct InfoCache {
    std::mutex mu;
    std::unordered_map<std::string, MoleculeInfo> map;
  };

  Catalog catalog_;
  std::vector<DisconnectionTemplate> templates_;
  int node_budget_;
  double atom_bound_;
  std::unique_ptr<InfoCache> cache_ = std::make_unique<InfoCache>();
};

}  // namespace synthweaver
