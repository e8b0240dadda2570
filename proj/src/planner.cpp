//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <tuple>
#include <sstream>
#include <unordered_map>

#include "synthweaver/smiles.hpp"

namespace synthweaver {

Catalog Catalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MoleculeError("cannot open catalog: " + path.string());
  Catalog cat;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line_no == 1 && line == "smiles,price") continue;
    std::size_t comma = line.rfind(',');
    if (comma == std::string::npos)
      throw MoleculeError(path.string() + ":" + std::to_string(line_no) + ": expected smiles,price");
    std::string smi = line.substr(0, comma);
    double price = 0.0;
    try {
      price = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw MoleculeError(path.string() + ":" + std::to_string(line_no) + ": bad price");
    }
    if (!(price > 0.0) || !std::isfinite(price))
      throw MoleculeError(path.string() + ":" + std::to_string(line_no) +
                          ": price must be finite and positive");
    try {
      cat.add(parse_smiles(smi), price);
    } catch (const MoleculeError& e) {
      throw MoleculeError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cat;
}

void Catalog::add(const Molecule& mol, double price) {
  std::string canon = write_smiles(mol);
  entries_[canon] = price;
  heavy_[canon] = mol.atom_count();
}

std::optional<double> Catalog::price(const std::string& canonical) const {
  auto it = entries_.find(canonical);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

double Catalog::price_per_atom_bound() const {
  double best = 1.0;
  bool any = false;
  for (const auto& [smi, price] : entries_) {
    double per = price / std::max(1, heavy_.at(smi));
    if (!any || per < best) {
      best = per;
      any = true;
    }
  }
  return any ? 0.9 * best : 0.0;
}

double DisconnectionTemplate::step_cost() const { return 1.0 - std::log(feasibility); }

const std::vector<DisconnectionTemplate>& default_templates() {
  using Env = DisconnectionTemplate::Env;
  static const std::vector<DisconnectionTemplate> kTemplates = {
      {"amide", Element::C, Element::N, Env::CarbonylCarbon, 0.90},
      {"sulfonamide", Element::S, Element::N, Env::SulfonylSulfur, 0.85},
      {"ester", Element::C, Element::O, Env::CarbonylCarbon, 0.85},
      {"amine", Element::C, Element::N, Env::PlainCarbon, 0.75},
      {"ether", Element::C, Element::O, Env::PlainCarbon, 0.70},
      {"biaryl", Element::C, Element::C, Env::BothAromatic, 0.60},
      {"alkyl", Element::C, Element::C, Env::None, 0.20},
  };
  return kTemplates;
}

namespace {

bool has_double_bonded_oxygen(const Molecule& m, int atom) {
  for (const Neighbor& nb : m.neighbors(atom)) {
    if (m.atom(nb.atom).element == Element::O && m.bond(nb.bond).order == BondOrder::Double)
      return true;
  }
  return false;
}

bool env_matches(const Molecule& m, const DisconnectionTemplate& t, int a, int b) {
  using Env = DisconnectionTemplate::Env;
  switch (t.env) {
    case Env::None:
      return true;
    case Env::CarbonylCarbon:
      return has_double_bonded_oxygen(m, a);
    case Env::PlainCarbon:
      return !has_double_bonded_oxygen(m, a);
    case Env::SulfonylSulfur:
      return has_double_bonded_oxygen(m, a);
    case Env::BothAromatic:
      return m.atom(a).aromatic && m.atom(b).aromatic;
  }
  return false;
}

}  // namespace

std::vector<TemplateMatch> match_templates(const Molecule& mol,
                                           const std::vector<DisconnectionTemplate>& templates) {
  std::vector<TemplateMatch> out;
  for (int b = 0; b < mol.bond_count(); ++b) {
    const Bond& bd = mol.bond(b);
    if (bd.order != BondOrder::Single || mol.bond_in_ring(b)) continue;
    for (const DisconnectionTemplate& t : templates) {
      Element ea = mol.atom(bd.a).element, eb = mol.atom(bd.b).element;
      bool fwd = ea == t.elem_a && eb == t.elem_b && env_matches(mol, t, bd.a, bd.b);
      bool rev = eb == t.elem_a && ea == t.elem_b && env_matches(mol, t, bd.b, bd.a);
      if (fwd || rev) out.push_back({b, &t});
    }
  }
  return out;
}

std::pair<Molecule, Molecule> cut_bond(const Molecule& mol, int bond) {
  if (mol.bond(bond).order != BondOrder::Single || mol.bond_in_ring(bond))
    throw MoleculeError("cut requires an acyclic single bond");
  const Bond& bd = mol.bond(bond);
  GraphBuilder left = GraphBuilder::from(mol);
  left.release_valence(bd.a, 1);
  left.release_valence(bd.b, 1);
  left.remove_bond(bond);
  GraphBuilder right = left;
  left.keep_component(bd.a);
  right.keep_component(bd.b);
  return {left.sanitize(), right.sanitize()};
}

std::string format_route_tree(const RouteResult& route) {
  std::ostringstream os;
  if (!route.solved) {
    os << "(no route found; nodes expanded: " << route.nodes_expanded << ")\n";
    return os.str();
  }
  std::map<std::string, const RouteStep*> by_target;
  for (const RouteStep& s : route.steps) {
    if (!by_target.count(s.target)) by_target[s.target] = &s;
  }
  std::map<std::string, double> price;
  for (const auto& [smi, p] : route.leaf_costs) price[smi] = p;

  std::function<void(const std::string&, int)> print = [&](const std::string& smi, int depth) {
    for (int k = 0; k < depth; ++k) os << "  ";
    auto it = by_target.find(smi);
    if (it != by_target.end()) {
      const RouteStep& s = *it->second;
      os << smi << " => " << s.part_a << " + " << s.part_b << "  [" << s.template_name << "]\n";
      print(s.part_a, depth + 1);
      print(s.part_b, depth + 1);
    } else {
      os << smi;
      auto p = price.find(smi);
      if (p != price.end()) os << "  ($" << p->second << ")";
      os << "\n";
    }
  };
  std::string root = route.steps.empty()
                         ? (route.leaf_costs.empty() ? "" : route.leaf_costs[0].first)
                         : route.steps[0].target;
  if (!root.empty()) print(root, 0);
  return os.str();
}

RoutePlanner::RoutePlanner(Catalog catalog, std::vector<DisconnectionTemplate> templates,
                           int node_budget)
    : catalog_(std::move(catalog)),
      templates_(std::move(templates)),
      node_budget_(node_budget),
      atom_bound_(catalog_.price_per_atom_bound()) {}

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (int x : v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull;
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

const RoutePlanner::MoleculeInfo& RoutePlanner::info_for(const std::string& canonical,
                                                         const Molecule* mol) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->map.find(canonical);
    if (it != cache_->map.end()) return it->second;
  }
  Molecule parsed;
  const Molecule& m = mol != nullptr ? *mol : (parsed = parse_smiles(canonical));
  MoleculeInfo info;
  info.heavy_atoms = m.atom_count();
  if (auto p = catalog_.price(canonical)) {
    info.in_catalog = true;
    info.price = *p;
  }
  if (!info.in_catalog) {
    for (const TemplateMatch& match : match_templates(m, templates_)) {
      auto [pa, pb] = cut_bond(m, match.bond);
      info.expansions.push_back(Expansion{match.tmpl->name, match.tmpl->step_cost(),
                                          write_smiles(pa), write_smiles(pb)});
    }
    info.dead = info.expansions.empty();
  }
  std::lock_guard<std::mutex> lock(cache_->mu);
  return cache_->map.emplace(canonical, std::move(info)).first->second;
}

RouteResult RoutePlanner::plan(const Molecule& mol) const {
  RouteResult result;
  std::string target = write_smiles(mol);

  // per-call interning of canonical SMILES; the MoleculeInfo objects live in
  // the planner-wide cache
  std::vector<const MoleculeInfo*> infos;
  std::vector<std::string> strings;
  std::unordered_map<std::string, int> ids;
  auto intern = [&](const std::string& canon, const Molecule* hint) {
    auto it = ids.find(canon);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(strings.size());
    ids.emplace(canon, id);
    strings.push_back(canon);
    infos.push_back(&info_for(canon, hint));
    return id;
  };

  struct LocalExp {
    const Expansion* exp;
    int part_a, part_b;
  };
  std::vector<std::vector<LocalExp>> local_exps;  // indexed by molecule id, lazy
  auto expansions_of = [&](int id) -> const std::vector<LocalExp>& {
    if (static_cast<std::size_t>(id) >= local_exps.size())
      local_exps.resize(static_cast<std::size_t>(id) + 1);
    auto& slot = local_exps[static_cast<std::size_t>(id)];
    if (slot.empty() && !infos[static_cast<std::size_t>(id)]->expansions.empty()) {
      for (const Expansion& e : infos[static_cast<std::size_t>(id)]->expansions) {
        slot.push_back(LocalExp{&e, intern(e.part_a, nullptr), intern(e.part_b, nullptr)});
      }
    }
    return local_exps[static_cast<std::size_t>(id)];
  };

  struct Node {
    double g = 0.0;
    double h = 0.0;
    std::vector<int> members;  // sorted unresolved molecule ids
    int parent = -1;           // node arena index
    int step_target = -1, step_a = -1, step_b = -1;
    const Expansion* step_exp = nullptr;
  };
  std::vector<Node> arena;
  std::unordered_map<std::vector<int>, int, VecHash> state_index;

  // splits purchasable members off into leaf prices; flags states holding a
  // member that is neither purchasable nor cuttable
  struct Resolved {
    std::vector<int> members;
    double leaf_price = 0.0;
    bool hopeless = false;
  };
  auto resolve = [&](std::vector<int> in) {
    Resolved r;
    for (int id : in) {
      const MoleculeInfo& info = *infos[static_cast<std::size_t>(id)];
      if (info.in_catalog) {
        r.leaf_price += info.price;
      } else {
        if (info.dead) r.hopeless = true;
        r.members.push_back(id);
      }
    }
    std::sort(r.members.begin(), r.members.end());
    return r;
  };
  auto heuristic = [&](const std::vector<int>& members) {
    double h = 0.0;
    for (int id : members) h += atom_bound_ * infos[static_cast<std::size_t>(id)]->heavy_atoms;
    return h;
  };

  // ties on f resolve by canonical-string order of the member multisets
  auto state_less = [&](const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] != b[i]) {
        return strings[static_cast<std::size_t>(a[i])] < strings[static_cast<std::size_t>(b[i])];
      }
    }
    return a.size() < b.size();
  };
  struct QueueItem {
    double f;
    int node;
  };
  auto queue_greater = [&](const QueueItem& x, const QueueItem& y) {
    if (x.f != y.f) return x.f > y.f;
    if (x.node == y.node) return false;
    return state_less(arena[static_cast<std::size_t>(y.node)].members,
                      arena[static_cast<std::size_t>(x.node)].members);
  };
  std::priority_queue<QueueItem, std::vector<QueueItem>, decltype(queue_greater)> open(
      queue_greater);

  {
    int target_id = intern(target, &mol);
    Resolved r = resolve({target_id});
    if (!r.hopeless) {
      Node root;
      root.g = r.leaf_price;
      root.h = heuristic(r.members);
      root.members = std::move(r.members);
      int idx = static_cast<int>(arena.size());
      state_index.emplace(root.members, idx);
      double f = root.g + root.h;
      arena.push_back(std::move(root));
      open.push({f, idx});
    }
  }

  int goal = -1;
  while (!open.empty()) {
    auto [f, node_idx] = open.top();
    open.pop();
    double g0, h0;
    std::vector<int> members;
    {
      const Node& node = arena[static_cast<std::size_t>(node_idx)];
      if (f > node.g + node.h + 1e-12) continue;  // stale entry
      if (node.members.empty()) {
        goal = node_idx;
        result.solved = true;
        result.total_cost = node.g;
        break;
      }
      g0 = node.g;
      h0 = node.h;
      members = node.members;
    }
    if (result.nodes_expanded >= node_budget_) break;
    ++result.nodes_expanded;

    for (std::size_t mi = 0; mi < members.size(); ++mi) {
      if (mi > 0 && members[mi] == members[mi - 1]) continue;  // identical member
      for (const LocalExp& le : expansions_of(members[mi])) {
        std::vector<int> next = members;
        next.erase(next.begin() + static_cast<long>(mi));
        next.push_back(le.part_a);
        next.push_back(le.part_b);
        Resolved r = resolve(std::move(next));
        if (r.hopeless) continue;

        double g = g0 + le.exp->step_cost + r.leaf_price;
        auto it = state_index.find(r.members);
        int idx;
        if (it != state_index.end()) {
          idx = it->second;
          if (arena[static_cast<std::size_t>(idx)].g <= g + 1e-12) continue;
        } else {
          idx = static_cast<int>(arena.size());
          arena.emplace_back();
          state_index.emplace(r.members, idx);
          arena[static_cast<std::size_t>(idx)].h = heuristic(r.members);
          arena[static_cast<std::size_t>(idx)].members = std::move(r.members);
        }
        Node& succ = arena[static_cast<std::size_t>(idx)];
        succ.g = g;
        succ.parent = node_idx;
        succ.step_target = members[mi];
        succ.step_a = le.part_a;
        succ.step_b = le.part_b;
        succ.step_exp = le.exp;
        open.push({g + succ.h, idx});
      }
    }
  }

  if (!result.solved) return result;

  // reconstruct the step sequence root -> goal
  for (int k = goal; k >= 0;) {
    const Node& n = arena[static_cast<std::size_t>(k)];
    if (n.step_exp == nullptr) break;
    result.steps.push_back(RouteStep{n.step_exp->template_name,
                                     strings[static_cast<std::size_t>(n.step_target)],
                                     strings[static_cast<std::size_t>(n.step_a)],
                                     strings[static_cast<std::size_t>(n.step_b)]});
    k = n.parent;
  }
  std::reverse(result.steps.begin(), result.steps.end());

  // replay to collect leaves with multiplicity; each step is consumed once
  std::vector<std::string> pending = {target};
  std::vector<bool> used(result.steps.size(), false);
  while (!pending.empty()) {
    std::string cur = pending.back();
    pending.pop_back();
    if (auto p = catalog_.price(cur)) {
      result.leaf_costs.emplace_back(cur, *p);
      continue;
    }
    bool found = false;
    for (std::size_t k = 0; k < result.steps.size(); ++k) {
      if (!used[k] && result.steps[k].target == cur) {
        used[k] = true;
        pending.push_back(result.steps[k].part_a);
        pending.push_back(result.steps[k].part_b);
        found = true;
        break;
      }
    }
    if (!found) break;  // should not happen on a solved route
  }
  std::sort(result.leaf_costs.begin(), result.leaf_costs.end());
  return result;
}

}  // namespace synthweaver
