//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace synthweaver {

enum class Element : std::uint8_t { C, N, O, F, P, S, Cl, Br, I, B };
inline constexpr int kElementCount = 10;
inline constexpr int kDefaultMaxAtoms = 50;

const char* element_symbol(Element e);
double element_mass(Element e);
double hydrogen_mass();
bool element_from_symbol(std::string_view s, Element& out);
// Elements that may carry the aromatic flag (lowercase in SMILES).
bool element_aromatic_capable(Element e);
// Allowed total valences for an element/charge pair, ascending.
std::span<const int> allowed_valences(Element e, int charge);
int max_allowed_valence(Element e, int charge);

enum class BondOrder : std::uint8_t { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

// Sigma contribution of a bond to the valence sum. Aromatic bonds count 1;
// the pi electron of a kekule double bond is accounted separately via the
// per-atom matching flag.
int sigma_order(BondOrder o);

struct Atom {
  Element element = Element::C;
  std::int8_t charge = 0;
  bool aromatic = false;
  std::uint8_t hydrogens = 0;  // total attached hydrogens
  bool h_fixed = false;        // pinned by bracket input or a graph edit; not re-derived
};

struct Bond {
  int a = -1;
  int b = -1;
  BondOrder order = BondOrder::Single;
  int other(int atom) const { return atom == a ? b : a; }
};

class MoleculeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Neighbor {
  int atom;
  int bond;
};

class GraphBuilder;

// Immutable sanitized molecular graph. Instances always satisfy the valence
// table, the heavy-atom cap, connectivity and the aromatic ring constraints.
// All operations on a Molecule are const; sharing across threads is safe.
class Molecule {
 public:
  Molecule() = default;

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }
  const Atom& atom(int i) const { return atoms_[i]; }
  const Bond& bond(int i) const { return bonds_[i]; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }

  std::span<const Neighbor> neighbors(int atom) const {
    return {adj_[atom].data(), adj_[atom].size()};
  }
  int degree(int atom) const { return static_cast<int>(adj_[atom].size()); }
  // Index of the bond joining a and b, or -1.
  int bond_between(int a, int b) const;

  // True when the bond lies on a cycle (is not a bridge).
  bool bond_in_ring(int bond) const { return bond_ring_[bond]; }
  // True when the aromatic atom carries the double bond of the kekule
  // assignment computed at sanitization. False for non-aromatic atoms.
  bool pi_matched(int atom) const { return pi_matched_[atom]; }

  // Sum of sigma bond orders at the atom (aromatic bonds count 1).
  int sigma_valence(int atom) const;
  // sigma valence plus the kekule pi electron, excluding hydrogens.
  int effective_valence(int atom) const {
    return sigma_valence(atom) + (pi_matched_[atom] ? 1 : 0);
  }

  int heteroatom_count() const;

 private:
  friend class GraphBuilder;
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adj_;
  std::vector<bool> bond_ring_;
  std::vector<bool> pi_matched_;
};

// Mutable molecular graph used to assemble or edit molecules before
// sanitization. sanitize() validates every invariant and produces an
// immutable Molecule; it throws MoleculeError on any violation.
// Atoms with h_fixed keep their hydrogen count through sanitization;
// hydrogens of all other atoms are re-derived from the valence table.
class GraphBuilder {
 public:
  GraphBuilder() = default;
  static GraphBuilder from(const Molecule& m);

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }
  const Atom& atom(int i) const { return atoms_[i]; }
  const Bond& bond(int i) const { return bonds_[i]; }

  // fixed_h < 0 means "derive hydrogens from the valence table".
  int add_atom(Element e, int charge = 0, bool aromatic = false, int fixed_h = -1);
  void add_bond(int a, int b, BondOrder order);

  void set_element(int atom, Element e);
  void set_charge(int atom, int charge);
  void set_aromatic(int atom, bool aromatic);
  void set_fixed_h(int atom, int fixed_h);  // -1 reverts to derived

  void set_bond_order(int bond, BondOrder order);
  void remove_bond(int bond);
  // Removes the atom and its bonds; indices above shift down by one.
  void remove_atom(int atom);

  int bond_between(int a, int b) const;
  std::vector<std::vector<int>> components() const;
  // Keeps only the connected component containing the given atom.
  void keep_component(int atom);

  // Frees bonding capacity on the atom: pinned hydrogen counts grow by
  // `amount`; derived ones are recomputed by the next sanitize() anyway.
  void release_valence(int atom, int amount);
  // Consumes bonding capacity; pinned hydrogen counts shrink.
  void consume_valence(int atom, int amount);

  Molecule sanitize(int max_atoms = kDefaultMaxAtoms) const;

 private:
  std::vector<Atom> atoms_;  // hydrogens/h_fixed carry the pinned-H state
  std::vector<Bond> bonds_;
};

}  // namespace synthweaver
