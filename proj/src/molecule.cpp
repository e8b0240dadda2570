//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/molecule.hpp"

#include <algorithm>
#include <array>
#include <functional>

namespace synthweaver {

namespace {

constexpr std::array<const char*, kElementCount> kSymbols = {
    "C", "N", "O", "F", "P", "S", "Cl", "Br", "I", "B"};

constexpr std::array<double, kElementCount> kMasses = {
    12.011, 14.007, 15.999, 18.998, 30.974, 32.06, 35.45, 79.904, 126.904, 10.81};

constexpr std::array<int, 1> kVal1 = {1};
constexpr std::array<int, 1> kVal2 = {2};
constexpr std::array<int, 1> kVal3 = {3};
constexpr std::array<int, 1> kVal4 = {4};
constexpr std::array<int, 2> kValP = {3, 5};
constexpr std::array<int, 3> kValS = {2, 4, 6};

}  // namespace

const char* element_symbol(Element e) { return kSymbols[static_cast<int>(e)]; }
double element_mass(Element e) { return kMasses[static_cast<int>(e)]; }
double hydrogen_mass() { return 1.008; }

bool element_from_symbol(std::string_view s, Element& out) {
  for (int i = 0; i < kElementCount; ++i) {
    if (s == kSymbols[i]) {
      out = static_cast<Element>(i);
      return true;
    }
  }
  return false;
}

bool element_aromatic_capable(Element e) {
  switch (e) {
    case Element::C:
    case Element::N:
    case Element::O:
    case Element::P:
    case Element::S:
    case Element::B:
      return true;
    default:
      return false;
  }
}

std::span<const int> allowed_valences(Element e, int charge) {
  if (e == Element::N && charge == 1) return kVal4;
  if (e == Element::O && charge == -1) return kVal1;
  switch (e) {
    case Element::C:
      return kVal4;
    case Element::N:
      return kVal3;
    case Element::O:
      return kVal2;
    case Element::F:
    case Element::Cl:
    case Element::Br:
    case Element::I:
      return kVal1;
    case Element::P:
      return kValP;
    case Element::S:
      return kValS;
    case Element::B:
      return kVal3;
  }
  return kVal4;
}

int max_allowed_valence(Element e, int charge) {
  auto v = allowed_valences(e, charge);
  return v[v.size() - 1];
}

int sigma_order(BondOrder o) {
  switch (o) {
    case BondOrder::Single:
    case BondOrder::Aromatic:
      return 1;
    case BondOrder::Double:
      return 2;
    case BondOrder::Triple:
      return 3;
  }
  return 1;
}

int Molecule::bond_between(int a, int b) const {
  for (const Neighbor& n : adj_[a]) {
    if (n.atom == b) return n.bond;
  }
  return -1;
}

int Molecule::sigma_valence(int atom) const {
  int sum = 0;
  for (const Neighbor& n : adj_[atom]) sum += sigma_order(bonds_[n.bond].order);
  return sum;
}

int Molecule::heteroatom_count() const {
  int k = 0;
  for (const Atom& a : atoms_) k += (a.element != Element::C) ? 1 : 0;
  return k;
}

GraphBuilder GraphBuilder::from(const Molecule& m) {
  GraphBuilder b;
  b.atoms_ = m.atoms_;
  b.bonds_ = m.bonds_;
  return b;
}

int GraphBuilder::add_atom(Element e, int charge, bool aromatic, int fixed_h) {
  Atom a;
  a.element = e;
  a.charge = static_cast<std::int8_t>(charge);
  a.aromatic = aromatic;
  a.h_fixed = fixed_h >= 0;
  a.hydrogens = a.h_fixed ? static_cast<std::uint8_t>(fixed_h) : 0;
  atoms_.push_back(a);
  return static_cast<int>(atoms_.size()) - 1;
}

void GraphBuilder::add_bond(int a, int b, BondOrder order) {
  if (a < 0 || b < 0 || a >= atom_count() || b >= atom_count())
    throw MoleculeError("bond endpoint out of range");
  if (a == b) throw MoleculeError("bond joins an atom to itself");
  if (bond_between(a, b) >= 0) throw MoleculeError("duplicate bond between atoms");
  bonds_.push_back(Bond{a, b, order});
}

void GraphBuilder::set_element(int atom, Element e) { atoms_[atom].element = e; }
void GraphBuilder::set_charge(int atom, int charge) {
  atoms_[atom].charge = static_cast<std::int8_t>(charge);
}
void GraphBuilder::set_aromatic(int atom, bool aromatic) { atoms_[atom].aromatic = aromatic; }

void GraphBuilder::set_fixed_h(int atom, int fixed_h) {
  atoms_[atom].h_fixed = fixed_h >= 0;
  atoms_[atom].hydrogens = fixed_h >= 0 ? static_cast<std::uint8_t>(fixed_h) : 0;
}

void GraphBuilder::set_bond_order(int bond, BondOrder order) { bonds_[bond].order = order; }

void GraphBuilder::remove_bond(int bond) { bonds_.erase(bonds_.begin() + bond); }

void GraphBuilder::remove_atom(int atom) {
  std::erase_if(bonds_, [&](const Bond& b) { return b.a == atom || b.b == atom; });
  for (Bond& b : bonds_) {
    if (b.a > atom) --b.a;
    if (b.b > atom) --b.b;
  }
  atoms_.erase(atoms_.begin() + atom);
}

int GraphBuilder::bond_between(int a, int b) const {
  for (int i = 0; i < bond_count(); ++i) {
    const Bond& x = bonds_[i];
    if ((x.a == a && x.b == b) || (x.a == b && x.b == a)) return i;
  }
  return -1;
}

std::vector<std::vector<int>> GraphBuilder::components() const {
  int n = atom_count();
  std::vector<std::vector<int>> adj(n);
  for (const Bond& b : bonds_) {
    adj[b.a].push_back(b.b);
    adj[b.b].push_back(b.a);
  }
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    int id = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<int> stack = {s};
    comp[s] = id;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      out[id].push_back(u);
      for (int v : adj[u]) {
        if (comp[v] < 0) {
          comp[v] = id;
          stack.push_back(v);
        }
      }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

void GraphBuilder::keep_component(int atom) {
  int n = atom_count();
  std::vector<std::vector<int>> adj(n);
  for (const Bond& b : bonds_) {
    adj[b.a].push_back(b.b);
    adj[b.b].push_back(b.a);
  }
  std::vector<bool> keep(n, false);
  std::vector<int> stack = {atom};
  keep[atom] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!keep[v]) {
        keep[v] = true;
        stack.push_back(v);
      }
    }
  }
  std::vector<int> remap(n, -1);
  std::vector<Atom> atoms;
  for (int i = 0; i < n; ++i) {
    if (keep[i]) {
      remap[i] = static_cast<int>(atoms.size());
      atoms.push_back(atoms_[i]);
    }
  }
  std::vector<Bond> bonds;
  for (const Bond& b : bonds_) {
    if (keep[b.a] && keep[b.b]) bonds.push_back(Bond{remap[b.a], remap[b.b], b.order});
  }
  atoms_ = std::move(atoms);
  bonds_ = std::move(bonds);
}

void GraphBuilder::release_valence(int atom, int amount) {
  Atom& a = atoms_[atom];
  if (a.h_fixed) {
    a.hydrogens = static_cast<std::uint8_t>(a.hydrogens + amount);
  } else if (a.aromatic) {
    // pin the freed hydrogens: re-derivation would hand the slot to the
    // kekule assignment instead (e.g. N-substituted azoles must regain an
    // explicit H, not a pi bond)
    a.h_fixed = true;
    a.hydrogens = static_cast<std::uint8_t>(a.hydrogens + amount);
  }
}

void GraphBuilder::consume_valence(int atom, int amount) {
  if (atoms_[atom].h_fixed) {
    if (atoms_[atom].hydrogens < amount)
      throw MoleculeError("atom has no free hydrogen to consume");
    atoms_[atom].hydrogens = static_cast<std::uint8_t>(atoms_[atom].hydrogens - amount);
  }
}

namespace {

// Bridge detection (Tarjan low-link, iterative). `active` masks the edge set.
std::vector<bool> find_bridges(int n, const std::vector<Bond>& bonds,
                               const std::vector<std::vector<Neighbor>>& adj,
                               const std::vector<bool>& active) {
  std::vector<bool> bridge(bonds.size(), false);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;
  struct Frame {
    int u;
    int parent_edge;
    size_t next;
  };
  for (int s = 0; s < n; ++s) {
    if (disc[s] >= 0) continue;
    std::vector<Frame> stack;
    disc[s] = low[s] = timer++;
    stack.push_back({s, -1, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < adj[f.u].size()) {
        Neighbor nb = adj[f.u][f.next++];
        if (!active[nb.bond] || nb.bond == f.parent_edge) continue;
        if (disc[nb.atom] < 0) {
          disc[nb.atom] = low[nb.atom] = timer++;
          stack.push_back({nb.atom, nb.bond, 0});
        } else {
          low[f.u] = std::min(low[f.u], disc[nb.atom]);
        }
      } else {
        int u = f.u;
        int pe = f.parent_edge;
        stack.pop_back();
        if (!stack.empty()) {
          int p = stack.back().u;
          low[p] = std::min(low[p], low[u]);
          if (low[u] > disc[p]) bridge[pe] = true;
        }
      }
    }
  }
  return bridge;
}

// Perfect matching over `need_pi` atoms using aromatic bonds; backtracking.
bool kekule_match(const std::vector<std::vector<int>>& cand_adj, std::vector<int>& mate,
                  size_t from) {
  size_t n = mate.size();
  size_t u = from;
  while (u < n && mate[u] >= 0) ++u;
  if (u >= n) return true;
  for (int v : cand_adj[u]) {
    if (mate[v] >= 0) continue;
    mate[u] = v;
    mate[v] = static_cast<int>(u);
    if (kekule_match(cand_adj, mate, u + 1)) return true;
    mate[u] = mate[v] = -1;
  }
  return false;
}

}  // namespace

Molecule GraphBuilder::sanitize(int max_atoms) const {
  int n = atom_count();
  if (n == 0) throw MoleculeError("empty molecule");
  if (n > max_atoms)
    throw MoleculeError("heavy-atom cap exceeded: " + std::to_string(n) + " > " +
                        std::to_string(max_atoms));

  Molecule m;
  m.atoms_ = atoms_;
  m.bonds_ = bonds_;
  m.adj_.assign(n, {});
  for (int i = 0; i < bond_count(); ++i) {
    const Bond& b = bonds_[i];
    if (b.a < 0 || b.b < 0 || b.a >= n || b.b >= n)
      throw MoleculeError("bond endpoint out of range");
    if (b.a == b.b) throw MoleculeError("bond joins an atom to itself");
    m.adj_[b.a].push_back({b.b, i});
    m.adj_[b.b].push_back({b.a, i});
  }
  for (int i = 0; i < n; ++i) {
    auto& nb = m.adj_[i];
    std::sort(nb.begin(), nb.end(), [](const Neighbor& x, const Neighbor& y) {
      return x.atom < y.atom;
    });
    for (size_t j = 1; j < nb.size(); ++j) {
      if (nb[j].atom == nb[j - 1].atom) throw MoleculeError("duplicate bond between atoms");
    }
  }

  for (int i = 0; i < n; ++i) {
    const Atom& a = atoms_[i];
    if (a.charge < -2 || a.charge > 2) throw MoleculeError("formal charge out of range");
    if (a.aromatic && !element_aromatic_capable(a.element))
      throw MoleculeError(std::string("element ") + element_symbol(a.element) +
                          " cannot be aromatic");
  }

  // connectivity
  {
    std::vector<bool> seen(n, false);
    std::vector<int> stack = {0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (const Neighbor& nb : m.adj_[u]) {
        if (!seen[nb.atom]) {
          seen[nb.atom] = true;
          ++count;
          stack.push_back(nb.atom);
        }
      }
    }
    if (count != n) throw MoleculeError("disconnected input");
  }

  // aromatic bonds must join two aromatic atoms and lie on an aromatic cycle
  std::vector<bool> arom_edge(bond_count(), false);
  bool any_aromatic_bond = false;
  for (int i = 0; i < bond_count(); ++i) {
    if (bonds_[i].order != BondOrder::Aromatic) continue;
    arom_edge[i] = true;
    any_aromatic_bond = true;
    if (!atoms_[bonds_[i].a].aromatic || !atoms_[bonds_[i].b].aromatic)
      throw MoleculeError("aromatic bond joins a non-aromatic atom");
  }
  if (any_aromatic_bond) {
    auto arom_bridges = find_bridges(n, bonds_, m.adj_, arom_edge);
    for (int i = 0; i < bond_count(); ++i) {
      if (arom_edge[i] && arom_bridges[i])
        throw MoleculeError("aromatic bond outside any aromatic ring");
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!atoms_[i].aromatic) continue;
    bool has_arom = false;
    for (const Neighbor& nb : m.adj_[i]) has_arom |= arom_edge[nb.bond];
    if (!has_arom) throw MoleculeError("aromatic atom not in an aromatic ring");
  }

  // kekule assignment: aromatic atoms with a free valence slot must pair up
  // into alternating double bonds along aromatic bonds
  m.pi_matched_.assign(n, false);
  {
    std::vector<int> sigma(n, 0);
    for (const Bond& b : bonds_) {
      sigma[b.a] += sigma_order(b.order);
      sigma[b.b] += sigma_order(b.order);
    }
    std::vector<int> cand_id(n, -1);
    std::vector<int> cand_atoms;
    for (int i = 0; i < n; ++i) {
      const Atom& a = atoms_[i];
      if (!a.aromatic) continue;
      int base = sigma[i] + (a.h_fixed ? a.hydrogens : 0);
      auto vals = allowed_valences(a.element, a.charge);
      int target = -1;
      for (int v : vals) {
        if (v >= base) {
          target = v;
          break;
        }
      }
      if (target < 0)
        throw MoleculeError(std::string("valence violation on aromatic ") +
                            element_symbol(a.element));
      if (target - base >= 1) {
        cand_id[i] = static_cast<int>(cand_atoms.size());
        cand_atoms.push_back(i);
      }
    }
    std::vector<std::vector<int>> cand_adj(cand_atoms.size());
    for (int i = 0; i < bond_count(); ++i) {
      if (!arom_edge[i]) continue;
      int ca = cand_id[bonds_[i].a], cb = cand_id[bonds_[i].b];
      if (ca >= 0 && cb >= 0) {
        cand_adj[ca].push_back(cb);
        cand_adj[cb].push_back(ca);
      }
    }
    std::vector<int> mate(cand_atoms.size(), -1);
    if (!kekule_match(cand_adj, mate, 0))
      throw MoleculeError("aromatic system has no alternating bond assignment");
    for (size_t c = 0; c < cand_atoms.size(); ++c) m.pi_matched_[cand_atoms[c]] = true;

    // hydrogens: pinned counts validated, derived counts filled to the
    // smallest allowed valence
    for (int i = 0; i < n; ++i) {
      Atom& a = m.atoms_[i];
      int eff = sigma[i] + (m.pi_matched_[i] ? 1 : 0);
      auto vals = allowed_valences(a.element, a.charge);
      if (a.h_fixed) {
        int total = eff + a.hydrogens;
        if (total > max_allowed_valence(a.element, a.charge))
          throw MoleculeError(std::string("valence violation on ") +
                              element_symbol(a.element) + ": " + std::to_string(total) +
                              " exceeds allowed");
      } else {
        int target = -1;
        for (int v : vals) {
          if (v >= eff) {
            target = v;
            break;
          }
        }
        if (target < 0)
          throw MoleculeError(std::string("valence violation on ") +
                              element_symbol(a.element) + ": " + std::to_string(eff) +
                              " exceeds allowed");
        a.hydrogens = static_cast<std::uint8_t>(target - eff);
      }
    }
  }

  // ring membership over the full graph
  {
    std::vector<bool> all(bond_count(), true);
    auto bridges = find_bridges(n, bonds_, m.adj_, all);
    m.bond_ring_.assign(bond_count(), false);
    for (int i = 0; i < bond_count(); ++i) m.bond_ring_[i] = !bridges[i];
  }

  return m;
}

}  // namespace synthweaver
