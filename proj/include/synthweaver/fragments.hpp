//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "synthweaver/molecule.hpp"

namespace synthweaver {

struct Fragment {
  Molecule mol;
  std::vector<int> attachments;        // atoms that may form the connecting bond
  std::vector<int> attachment_class;   // canonical rank of each attachment atom
  std::string smiles;                  // canonical form, attachment-free
};

struct FragmentLibrary {
  std::string name;
  std::vector<Fragment> fragments;
  bool empty() const { return fragments.empty(); }
  std::size_t size() const { return fragments.size(); }
};

// One fragment per line as SMILES with '*' dummy atoms marking attachment
// points; lines starting with '#' are comments. Errors carry the line number.
FragmentLibrary load_fragment_library(const std::filesystem::path& path);
FragmentLibrary parse_fragment_library(std::istream& in, const std::string& name);

// Builds a single fragment from a '*'-marked SMILES.
Fragment parse_fragment(std::string_view smiles);

}  // namespace synthweaver
