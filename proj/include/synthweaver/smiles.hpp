//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "synthweaver/molecule.hpp"

namespace synthweaver {

class ParseError : public MoleculeError {
 public:
  ParseError(std::size_t position, const std::string& what)
      : MoleculeError("char " + std::to_string(position) + ": " + what),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Parses the supported SMILES subset: organic-subset atoms, bracket atoms
// with charge and explicit hydrogens, branches, ring closures (digits and
// %nn), bond symbols - = # :, lowercase aromatics. No stereochemistry, no
// isotopes, no multi-fragment input. The result is sanitized.
Molecule parse_smiles(std::string_view text, int max_atoms = kDefaultMaxAtoms);

// Parser entry used by fragment libraries: '*' dummy atoms are accepted and
// reported (with their neighbor) instead of rejected. The builder is NOT
// sanitized; dummies are still present as plain carbon atoms flagged in
// `dummies`.
struct RawParse {
  GraphBuilder builder;
  std::vector<int> dummies;
};
RawParse parse_smiles_raw(std::string_view text, bool allow_dummy);

// Canonical SMILES: the output depends only on the isomorphism class of the
// molecule. parse_smiles(write_smiles(m)) is isomorphic to m.
std::string write_smiles(const Molecule& mol);

// Morgan-style refinement classes over (element, charge, degree, aromatic,
// hydrogens) invariants. Equal values mark atoms that the refinement could
// not distinguish; the multiset of ranks is invariant under relabeling.
std::vector<int> canonical_ranks(const Molecule& mol);

}  // namespace synthweaver
