//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "support/testutil.hpp"
#include "synthweaver/actions.hpp"
#include "synthweaver/fragments.hpp"
#include "synthweaver/smiles.hpp"

using namespace synthweaver;
using synthweaver::test::isomorphic;

namespace {

FragmentLibrary lib_from_lines(const std::string& text, const std::string& name = "test") {
  std::istringstream in(text);
  return parse_fragment_library(in, name);
}

}  // namespace

TEST_CASE("fragment parsing: methyl marker") {
  Fragment f = parse_fragment("C*");
  CHECK(f.mol.atom_count() == 1);
  CHECK(f.attachments == std::vector<int>{0});
  CHECK(f.mol.atom(0).hydrogens == 4);  // refilled after marker removal
  CHECK(f.smiles == "C");

  Fragment phenyl = parse_fragment("*c1ccccc1");
  CHECK(phenyl.mol.atom_count() == 6);
  CHECK(phenyl.attachments.size() == 1);

  // two markers on one atom collapse to one attachment point
  Fragment methylene = parse_fragment("*C*");
  CHECK(methylene.attachments == std::vector<int>{0});

  CHECK_THROWS_AS(parse_fragment("CC"), MoleculeError);    // no marker
  CHECK_THROWS_AS(parse_fragment("C=*"), MoleculeError);   // non-single marker bond
  CHECK_THROWS_AS(parse_fragment("*"), MoleculeError);     // marker only
  CHECK_THROWS_AS(parse_fragment("C(*)(*)(*)(*)*"), MoleculeError);
}

TEST_CASE("fragment library: parsing, comments, errors") {
  FragmentLibrary lib = lib_from_lines("C*\n# a comment\n\n*N albeit-named\nO=C(O)C* acetic\n");
  CHECK(lib.size() == 3);

  CHECK_THROWS_WITH_AS(lib_from_lines(""), doctest::Contains("empty library"), MoleculeError);
  CHECK_THROWS_WITH_AS(lib_from_lines("C*\nnot_smiles!\n"), doctest::Contains(":2:"),
                       MoleculeError);
  CHECK_THROWS_WITH_AS(lib_from_lines("CC\n"), doctest::Contains("attachment"), MoleculeError);
}

TEST_CASE("enumerate: methane in fragment space with methyl library") {
  SearchSpace space = make_fragment_space(lib_from_lines("C*\n"));
  Molecule methane = parse_smiles("C");
  auto actions = enumerate_actions(space, methane);
  // one host class x one attachment, no bonds to disconnect
  REQUIRE(actions.size() == 1);
  CHECK(actions[0].kind == Action::Kind::FragmentAttach);

  Molecule ethane = apply_action(space, methane, actions[0]);
  CHECK(write_smiles(ethane) == "CC");
}

TEST_CASE("enumerate: disconnects come in pairs per bridge bond") {
  SearchSpace space = make_fragment_space(lib_from_lines("C*\n"));
  Molecule ethane = parse_smiles("CC");
  auto actions = enumerate_actions(space, ethane);
  int disconnects = 0;
  for (const Action& a : actions) {
    if (a.kind == Action::Kind::Disconnect) ++disconnects;
  }
  CHECK(disconnects == 2);

  Action d;
  d.kind = Action::Kind::Disconnect;
  d.bond = 0;
  d.keep_side = 0;
  Molecule kept = apply_action(space, ethane, d);
  CHECK(write_smiles(kept) == "C");
}

TEST_CASE("enumerate: single atom in graph-edit space") {
  SearchSpace space = make_graph_edit_space();
  Molecule methane = parse_smiles("C");
  auto actions = enumerate_actions(space, methane);
  std::set<Action::Kind> kinds;
  for (const Action& a : actions) kinds.insert(a.kind);
  CHECK(kinds.count(Action::Kind::Disconnect) == 0);
  CHECK(kinds.count(Action::Kind::DeleteBond) == 0);
  CHECK(kinds.count(Action::Kind::DeleteAtom) == 0);  // single atom stays
  CHECK(kinds.count(Action::Kind::MutateBond) == 0);

  // AddAtom for each (element, order) legal by valence
  int adds = 0;
  for (const Action& a : actions) {
    if (a.kind != Action::Kind::AddAtom) continue;
    ++adds;
    CHECK(sigma_order(a.order) <= max_allowed_valence(a.element, 0));
  }
  // C,N,S: orders 1..3; O: 1..2; F,Cl,Br: 1 -> 3+3+3+2+1+1+1
  CHECK(adds == 14);
}

TEST_CASE("enumerate: molecule at the cap has no atom-adding actions") {
  SearchSpace space = make_fragment_space(lib_from_lines("C*\n"));
  std::string big(50, 'C');
  Molecule mol = parse_smiles(big);
  for (const Action& a : enumerate_actions(space, mol)) {
    CHECK(a.kind == Action::Kind::Disconnect);
  }

  SearchSpace ge = make_graph_edit_space();
  for (const Action& a : enumerate_actions(ge, mol)) {
    CHECK(a.kind != Action::Kind::AddAtom);
    CHECK(a.kind != Action::Kind::FuseRing);
  }
}

TEST_CASE("apply: benzene + aromatic 6-ring fusion = naphthalene") {
  SearchSpace space = make_graph_edit_space();
  Molecule benzene = parse_smiles("c1ccccc1");
  Action fuse;
  fuse.kind = Action::Kind::FuseRing;
  fuse.bond = 0;
  fuse.ring_size = 6;
  fuse.ring_aromatic = true;
  Molecule result = apply_action(space, benzene, fuse);

  // hand-constructed naphthalene
  GraphBuilder nb;
  for (int i = 0; i < 10; ++i) nb.add_atom(Element::C, 0, true);
  int ring1[6] = {0, 1, 2, 3, 4, 5};
  for (int k = 0; k < 5; ++k) nb.add_bond(ring1[k], ring1[k + 1], BondOrder::Aromatic);
  nb.add_bond(5, 0, BondOrder::Aromatic);
  nb.add_bond(0, 6, BondOrder::Aromatic);
  nb.add_bond(6, 7, BondOrder::Aromatic);
  nb.add_bond(7, 8, BondOrder::Aromatic);
  nb.add_bond(8, 9, BondOrder::Aromatic);
  nb.add_bond(9, 1, BondOrder::Aromatic);
  Molecule naphthalene = nb.sanitize();

  CHECK(write_smiles(result) == write_smiles(naphthalene));
}

TEST_CASE("closure: applying any enumerated action yields a sane molecule") {
  SearchSpace frag = make_fragment_space(lib_from_lines("C*\n*N\n*c1ccccc1\nO=C(O)C*\n"));
  SearchSpace ge = make_graph_edit_space();
  for (const std::string& smi :
       {"CC(=O)N", "c1ccccc1", "CC(C)C", "C1CCCCC1", "O=S(=O)(N)c1ccccc1"}) {
    Molecule m = parse_smiles(smi);
    for (const SearchSpace& space : {std::cref(frag).get(), std::cref(ge).get()}) {
      for (auto& [action, result] : enumerate_with_results(space, m)) {
        CHECK(result.atom_count() <= space.max_atoms);
        for (int i = 0; i < result.atom_count(); ++i) {
          int total = result.effective_valence(i) + result.atom(i).hydrogens;
          CHECK(total <= max_allowed_valence(result.atom(i).element, result.atom(i).charge));
        }
      }
    }
  }
}

TEST_CASE("reversibility: attach then disconnect the new bridge bond") {
  SearchSpace space = make_fragment_space(lib_from_lines("C*\n*c1ccccc1\nO=C(O)C*\n"));
  for (const std::string& smi : {"CC(=O)N", "c1ccccc1", "CCO"}) {
    Molecule m = parse_smiles(smi);
    for (auto& [action, attached] : enumerate_with_results(space, m)) {
      if (action.kind != Action::Kind::FragmentAttach) continue;
      // the connecting bond is appended last
      int bridge = attached.bond_count() - 1;
      Action d;
      d.kind = Action::Kind::Disconnect;
      d.bond = bridge;
      d.keep_side = 0;  // bond was added host -> fragment
      Molecule back = apply_action(space, attached, d);
      CHECK(isomorphic(back, m));
    }
  }
}

TEST_CASE("enumerate: deterministic and sorted") {
  SearchSpace space = make_graph_edit_space();
  Molecule m = parse_smiles("CC(=O)N");
  auto a1 = enumerate_actions(space, m);
  auto a2 = enumerate_actions(space, m);
  CHECK(a1 == a2);
  CHECK(std::is_sorted(a1.begin(), a1.end()));
}

TEST_CASE("random_molecule: determinism and contracts") {
  SearchSpace frag = make_fragment_space(lib_from_lines("C*\n*N\n*c1ccccc1\nO=C(O)C*\n"));
  SearchSpace ge = make_graph_edit_space();

  Rng r0(11);
  Molecule seed_only = random_molecule(frag, r0, 0);
  bool is_library_fragment = false;
  for (const Fragment& f : frag.library.fragments) {
    is_library_fragment |= write_smiles(seed_only) == f.smiles;
  }
  CHECK(is_library_fragment);

  for (const SearchSpace& space : {std::cref(frag).get(), std::cref(ge).get()}) {
    Rng a(42), b(42), c(43);
    Molecule ma = random_molecule(space, a, 20);
    Molecule mb = random_molecule(space, b, 20);
    CHECK(ma.atom_count() <= 50);
    CHECK(write_smiles(ma) == write_smiles(mb));
    Molecule mc = random_molecule(space, c, 20);
    CHECK(mc.atom_count() >= 1);  // different seed still yields a valid molecule
  }
}

TEST_CASE("shipped fragment libraries carry the contracted counts") {
  FragmentLibrary l105 = load_fragment_library(SYNTHWEAVER_DATA_DIR "/fragments_105.smi");
  CHECK(l105.size() == 105);
  FragmentLibrary l464 = load_fragment_library(SYNTHWEAVER_DATA_DIR "/fragments_464.smi");
  CHECK(l464.size() == 464);
  for (const Fragment& f : l464.fragments) {
    CHECK(f.attachments.size() >= 1);
    for (int a : f.attachments) CHECK(f.mol.atom(a).hydrogens >= 1);
  }
}
