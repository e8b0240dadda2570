//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "synthweaver/fragments.hpp"
#include "synthweaver/molecule.hpp"
#include "synthweaver/rng.hpp"

namespace synthweaver {

class ActionError : public MoleculeError {
 public:
  using MoleculeError::MoleculeError;
};

enum class SpaceKind { Fragment, GraphEdit };

struct SearchSpace {
  SpaceKind kind = SpaceKind::GraphEdit;
  FragmentLibrary library;  // fragment kind only
  int max_atoms = kDefaultMaxAtoms;
};

SearchSpace make_fragment_space(FragmentLibrary lib, int max_atoms = kDefaultMaxAtoms);
SearchSpace make_graph_edit_space(int max_atoms = kDefaultMaxAtoms);

// Elements available to AddAtom / MutateAtom in the graph-edit space.
std::span<const Element> graph_edit_elements();

struct Action {
  enum class Kind : std::uint8_t {
    FragmentAttach,
    Disconnect,
    AddAtom,
    MutateAtom,
    MutateBond,
    DeleteAtom,
    DeleteBond,
    FuseRing,
  };

  Kind kind = Kind::FragmentAttach;
  int fragment_id = -1;    // FragmentAttach
  int host_atom = -1;      // FragmentAttach / AddAtom
  int fragment_atom = -1;  // FragmentAttach
  int bond = -1;           // Disconnect / MutateBond / DeleteBond / FuseRing anchor
  int keep_side = 0;       // Disconnect: 0 keeps the bond.a side, 1 the bond.b side
  int atom = -1;           // MutateAtom / DeleteAtom / FuseRing anchor
  Element element = Element::C;         // AddAtom / MutateAtom
  BondOrder order = BondOrder::Single;  // AddAtom / MutateBond
  int ring_size = 0;                    // FuseRing: 5 or 6
  bool ring_aromatic = false;

  auto encode() const {
    return std::tuple(static_cast<int>(kind), fragment_id, host_atom, fragment_atom, bond,
                      keep_side, atom, static_cast<int>(element), static_cast<int>(order),
                      ring_size, ring_aromatic ? 1 : 0);
  }
  bool operator<(const Action& o) const { return encode() < o.encode(); }
  bool operator==(const Action& o) const { return encode() == o.encode(); }
  std::string to_string() const;
};

// All legal actions for the molecule in this space, deterministically ordered
// by action encoding. Symmetry-equivalent candidates (by canonical rank) are
// deduplicated, except that every bridge bond keeps its two Disconnect sides.
std::vector<Action> enumerate_actions(const SearchSpace& space, const Molecule& mol);

// Same enumeration, keeping the sanitized successor of every action so
// callers that score successors do not apply actions twice.
std::vector<std::pair<Action, Molecule>> enumerate_with_results(const SearchSpace& space,
                                                                const Molecule& mol);

// Applies one action, returning a new sanitized molecule. Throws ActionError
// on any structurally illegal action.
Molecule apply_action(const SearchSpace& space, const Molecule& mol, const Action& action);

// Fresh starting point: a single carbon (graph edit) or one uniformly random
// library fragment, followed by n_init uniformly random legal actions.
Molecule random_molecule(const SearchSpace& space, Rng& rng, int n_init);

}  // namespace synthweaver
