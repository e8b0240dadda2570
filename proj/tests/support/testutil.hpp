//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "synthweaver/molecule.hpp"
#include "synthweaver/rng.hpp"

namespace synthweaver::test {

inline bool atoms_equivalent(const Atom& a, const Atom& b) {
  return a.element == b.element && a.charge == b.charge && a.aromatic == b.aromatic &&
         a.hydrogens == b.hydrogens;
}

// VF2-style brute-force graph isomorphism on sanitized molecules. Intended
// for instances of <= 30 atoms.
inline bool isomorphic(const Molecule& x, const Molecule& y) {
  int n = x.atom_count();
  if (n != y.atom_count() || x.bond_count() != y.bond_count()) return false;

  std::vector<int> map(n, -1), rmap(n, -1);

  std::function<bool(int)> extend = [&](int i) -> bool {
    if (i == n) return true;
    for (int j = 0; j < n; ++j) {
      if (rmap[j] >= 0) continue;
      if (!atoms_equivalent(x.atom(i), y.atom(j))) continue;
      if (x.degree(i) != y.degree(j)) continue;
      // bonds from i to already-mapped atoms must exist identically in y
      bool ok = true;
      for (const Neighbor& nb : x.neighbors(i)) {
        if (nb.atom > i || map[nb.atom] < 0) continue;
        int by = y.bond_between(j, map[nb.atom]);
        if (by < 0 || y.bond(by).order != x.bond(nb.bond).order) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      // and j must not have extra bonds into the mapped region
      for (const Neighbor& nb : y.neighbors(j)) {
        if (rmap[nb.atom] >= 0 && rmap[nb.atom] < i && x.bond_between(i, rmap[nb.atom]) < 0) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      map[i] = j;
      rmap[j] = i;
      if (extend(i + 1)) return true;
      map[i] = -1;
      rmap[j] = -1;
    }
    return false;
  };
  return extend(0);
}

// Rebuilds the molecule with atoms relabeled by `perm` (new index of atom i
// is perm[i]).
inline Molecule permuted(const Molecule& m, const std::vector<int>& perm) {
  GraphBuilder b;
  int n = m.atom_count();
  std::vector<int> inv(n);
  for (int i = 0; i < n; ++i) inv[perm[i]] = i;
  for (int p = 0; p < n; ++p) {
    const Atom& a = m.atom(inv[p]);
    b.add_atom(a.element, a.charge, a.aromatic, a.h_fixed ? a.hydrogens : -1);
  }
  for (const Bond& bd : m.bonds()) b.add_bond(perm[bd.a], perm[bd.b], bd.order);
  return b.sanitize();
}

inline std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace synthweaver::test
