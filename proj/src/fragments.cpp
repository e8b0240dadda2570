//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/fragments.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "synthweaver/smiles.hpp"

namespace synthweaver {

Fragment parse_fragment(std::string_view smiles) {
  RawParse raw = parse_smiles_raw(smiles, /*allow_dummy=*/true);
  if (raw.dummies.empty()) throw MoleculeError("fragment with no attachment point");

  GraphBuilder& b = raw.builder;
  std::vector<int> attachments;
  for (int d : raw.dummies) {
    int seen = 0;
    int neighbor = -1;
    for (int i = 0; i < b.bond_count(); ++i) {
      const Bond& bd = b.bond(i);
      if (bd.a == d || bd.b == d) {
        ++seen;
        neighbor = bd.other(d);
        if (bd.order != BondOrder::Single)
          throw MoleculeError("attachment marker must use a single bond");
      }
    }
    if (seen != 1) throw MoleculeError("attachment marker needs exactly one bond");
    if (std::find(raw.dummies.begin(), raw.dummies.end(), neighbor) != raw.dummies.end())
      throw MoleculeError("attachment marker bonded to another marker");
    attachments.push_back(neighbor);
  }

  // the marked form must itself satisfy the valence table
  for (int a : attachments) {
    int sigma = 0;
    for (int i = 0; i < b.bond_count(); ++i) {
      const Bond& bd = b.bond(i);
      if (bd.a == a || bd.b == a) sigma += sigma_order(bd.order);
    }
    const Atom& at = b.atom(a);
    if (sigma + (at.h_fixed ? at.hydrogens : 0) > max_allowed_valence(at.element, at.charge))
      throw MoleculeError("attachment atom exceeds its valence with markers attached");
  }

  // drop markers from the top so surviving indices shift predictably
  std::vector<int> dummies = raw.dummies;
  std::sort(dummies.begin(), dummies.end(), std::greater<>());
  for (int d : dummies) {
    b.remove_atom(d);
    for (int& a : attachments) {
      if (a > d) --a;
    }
  }
  std::sort(attachments.begin(), attachments.end());
  attachments.erase(std::unique(attachments.begin(), attachments.end()), attachments.end());

  Fragment f;
  f.mol = b.sanitize();
  f.attachments = attachments;
  for (int a : attachments) {
    if (f.mol.atom(a).hydrogens < 1)
      throw MoleculeError("attachment atom has no free valence");
  }
  auto ranks = canonical_ranks(f.mol);
  for (int a : attachments) f.attachment_class.push_back(ranks[a]);
  f.smiles = write_smiles(f.mol);
  return f;
}

FragmentLibrary parse_fragment_library(std::istream& in, const std::string& name) {
  FragmentLibrary lib;
  lib.name = name;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // strip trailing CR and surrounding whitespace
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    std::string token = line.substr(start);
    if (std::size_t ws = token.find_first_of(" \t"); ws != std::string::npos)
      token = token.substr(0, ws);
    try {
      lib.fragments.push_back(parse_fragment(token));
    } catch (const MoleculeError& e) {
      throw MoleculeError(name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (lib.fragments.empty()) throw MoleculeError(name + ": empty library");
  return lib;
}

FragmentLibrary load_fragment_library(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MoleculeError("cannot open fragment library: " + path.string());
  return parse_fragment_library(in, path.filename().string());
}

}  // namespace synthweaver
