//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <vector>

#include "synthweaver/molecule.hpp"

namespace synthweaver {

struct DescriptorSet {
  double molecular_weight = 0.0;
  int heavy_atoms = 0;
  int ring_count = 0;           // cyclomatic number (bonds - atoms + 1)
  int aromatic_ring_count = 0;
  int rotatable_bonds = 0;      // acyclic single bonds between non-terminal atoms
  double heteroatom_fraction = 0.0;
  int largest_ring_size = 0;    // 0 for acyclic molecules
};

// Ring structure derived from smallest cycles through each ring bond.
struct RingInfo {
  std::vector<int> smallest_cycle;           // per bond; 0 for acyclic bonds
  std::vector<std::vector<int>> rings;       // distinct smallest cycles, sorted atom lists
  std::vector<bool> ring_is_aromatic;        // all bonds of the cycle aromatic
  int cyclomatic = 0;
  // Sum over atoms of max(0, ring_degree - 2) / 2: a rough count of ring
  // fusion points (0 for isolated rings, 1 for naphthalene, ...).
  double fusion_excess = 0.0;
};

RingInfo analyze_rings(const Molecule& mol);

DescriptorSet descriptors(const Molecule& mol);

// Fixed-width bit vector used by fingerprints and the property model.
class BitVector {
 public:
  explicit BitVector(int nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}
  int size() const { return nbits_; }
  bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
  void set(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  int count() const;
  std::vector<int> on_bits() const;
  bool operator==(const BitVector& o) const = default;

 private:
  int nbits_;
  std::vector<std::uint64_t> words_;
};

// Circular-substructure fingerprint: for every atom and every radius
// r <= radius, the canonical invariant of the r-neighborhood is hashed to
// one bit. Deterministic across runs and platforms (FNV-1a, no seed state).
// Requires radius <= 3 and nbits a power of two.
BitVector fingerprint(const Molecule& mol, int radius = 2, int nbits = 2048);

}  // namespace synthweaver
