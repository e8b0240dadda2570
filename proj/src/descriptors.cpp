//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/descriptors.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <set>

namespace synthweaver {

namespace {

// Shortest cycle through the bond: BFS between its endpoints with the bond
// removed. Returns 0 when no alternative path exists (bridge).
int smallest_cycle_through(const Molecule& m, int bond) {
  const Bond& b = m.bond(bond);
  std::vector<int> dist(m.atom_count(), -1);
  std::deque<int> q;
  dist[b.a] = 0;
  q.push_back(b.a);
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    if (u == b.b) return dist[u] + 1;
    for (const Neighbor& nb : m.neighbors(u)) {
      if (nb.bond == bond || dist[nb.atom] >= 0) continue;
      dist[nb.atom] = dist[u] + 1;
      q.push_back(nb.atom);
    }
  }
  return 0;
}

// Atoms of one shortest cycle through the bond, sorted. Deterministic: BFS
// explores neighbors in adjacency (ascending atom index) order.
std::vector<int> cycle_atoms_through(const Molecule& m, int bond) {
  const Bond& b = m.bond(bond);
  std::vector<int> prev(m.atom_count(), -2);
  std::deque<int> q;
  prev[b.a] = -1;
  q.push_back(b.a);
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    if (u == b.b) break;
    for (const Neighbor& nb : m.neighbors(u)) {
      if (nb.bond == bond || prev[nb.atom] != -2) continue;
      prev[nb.atom] = u;
      q.push_back(nb.atom);
    }
  }
  std::vector<int> atoms;
  for (int u = b.b; u != -1; u = prev[u]) atoms.push_back(u);
  std::sort(atoms.begin(), atoms.end());
  return atoms;
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) {
    h ^= (v >> (8 * k)) & 0xff;
    h *= 0x100000001b3ull;
  }
  return h;
}

constexpr std::uint64_t kFnvBasis = 0xcbf29ce484222325ull;

}  // namespace

RingInfo analyze_rings(const Molecule& mol) {
  RingInfo info;
  info.cyclomatic = mol.bond_count() - mol.atom_count() + 1;
  if (info.cyclomatic < 0) info.cyclomatic = 0;
  info.smallest_cycle.assign(mol.bond_count(), 0);

  std::set<std::vector<int>> seen;
  std::vector<int> ring_degree(mol.atom_count(), 0);
  for (int b = 0; b < mol.bond_count(); ++b) {
    if (!mol.bond_in_ring(b)) continue;
    info.smallest_cycle[b] = smallest_cycle_through(mol, b);
    ++ring_degree[mol.bond(b).a];
    ++ring_degree[mol.bond(b).b];
    auto atoms = cycle_atoms_through(mol, b);
    if (seen.insert(atoms).second) {
      bool aromatic = true;
      for (std::size_t k = 0; k < atoms.size() && aromatic; ++k) {
        aromatic &= mol.atom(atoms[k]).aromatic;
      }
      // the ring's own bonds must be aromatic too (rules out e.g. the
      // central ring of biphenylene)
      for (std::size_t k = 0; k < atoms.size() && aromatic; ++k) {
        for (std::size_t j = k + 1; j < atoms.size() && aromatic; ++j) {
          int bb = mol.bond_between(atoms[k], atoms[j]);
          if (bb >= 0) aromatic &= mol.bond(bb).order == BondOrder::Aromatic;
        }
      }
      info.rings.push_back(atoms);
      info.ring_is_aromatic.push_back(aromatic);
    }
  }
  for (int i = 0; i < mol.atom_count(); ++i) {
    if (ring_degree[i] > 2) info.fusion_excess += (ring_degree[i] - 2) / 2.0;
  }
  return info;
}

DescriptorSet descriptors(const Molecule& mol) {
  DescriptorSet d;
  d.heavy_atoms = mol.atom_count();
  for (int i = 0; i < mol.atom_count(); ++i) {
    const Atom& a = mol.atom(i);
    d.molecular_weight += element_mass(a.element) + a.hydrogens * hydrogen_mass();
  }
  RingInfo rings = analyze_rings(mol);
  d.ring_count = rings.cyclomatic;
  for (std::size_t r = 0; r < rings.rings.size(); ++r) {
    if (rings.ring_is_aromatic[r]) ++d.aromatic_ring_count;
    d.largest_ring_size =
        std::max(d.largest_ring_size, static_cast<int>(rings.rings[r].size()));
  }
  for (int b = 0; b < mol.bond_count(); ++b) {
    const Bond& bd = mol.bond(b);
    if (bd.order != BondOrder::Single || mol.bond_in_ring(b)) continue;
    if (mol.degree(bd.a) >= 2 && mol.degree(bd.b) >= 2) ++d.rotatable_bonds;
  }
  d.heteroatom_fraction =
      static_cast<double>(mol.heteroatom_count()) / static_cast<double>(mol.atom_count());
  return d;
}

int BitVector::count() const {
  int c = 0;
  for (std::uint64_t w : words_) c += std::popcount(w);
  return c;
}

std::vector<int> BitVector::on_bits() const {
  std::vector<int> out;
  for (int i = 0; i < nbits_; ++i) {
    if (test(i)) out.push_back(i);
  }
  return out;
}

BitVector fingerprint(const Molecule& mol, int radius, int nbits) {
  if (radius < 0 || radius > 3) throw MoleculeError("fingerprint radius must be in [0,3]");
  if (nbits <= 0 || (nbits & (nbits - 1)) != 0)
    throw MoleculeError("fingerprint nbits must be a power of two");

  int n = mol.atom_count();
  std::vector<std::uint64_t> inv(n);
  for (int i = 0; i < n; ++i) {
    const Atom& a = mol.atom(i);
    std::uint64_t h = kFnvBasis;
    h = fnv1a(h, static_cast<std::uint64_t>(a.element));
    h = fnv1a(h, static_cast<std::uint64_t>(a.charge + 8));
    h = fnv1a(h, a.aromatic ? 1 : 0);
    h = fnv1a(h, a.hydrogens);
    h = fnv1a(h, static_cast<std::uint64_t>(mol.degree(i)));
    inv[i] = h;
  }
  BitVector bits(nbits);
  std::uint64_t mask = static_cast<std::uint64_t>(nbits) - 1;
  for (int i = 0; i < n; ++i) bits.set(static_cast<int>(inv[i] & mask));
  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint64_t> next(n);
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> nb;
      for (const Neighbor& x : mol.neighbors(i)) {
        nb.emplace_back(static_cast<std::uint64_t>(mol.bond(x.bond).order), inv[x.atom]);
      }
      std::sort(nb.begin(), nb.end());
      std::uint64_t h = kFnvBasis;
      h = fnv1a(h, static_cast<std::uint64_t>(r));
      h = fnv1a(h, inv[i]);
      for (auto [o, v] : nb) {
        h = fnv1a(h, o);
        h = fnv1a(h, v);
      }
      next[i] = h;
    }
    inv = std::move(next);
    for (int i = 0; i < n; ++i) bits.set(static_cast<int>(inv[i] & mask));
  }
  return bits;
}

}  // namespace synthweaver
