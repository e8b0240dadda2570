//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/testutil.hpp"
#include "synthweaver/descriptors.hpp"
#include "synthweaver/molecule.hpp"
#include "synthweaver/smiles.hpp"

using namespace synthweaver;
using synthweaver::test::isomorphic;
using synthweaver::test::permuted;
using synthweaver::test::random_permutation;

namespace {

// nontrivial, hand-checked inputs reused across suites
const std::vector<std::string> kCorpus = {
    "C",
    "CC",
    "CCO",
    "CC(=O)N",
    "CC(C)(C)C",
    "c1ccccc1",
    "c1ccncc1",
    "c1cc[nH]c1",
    "c1ccc2ccccc2c1",
    "CC(=O)Oc1ccccc1C(=O)O",
    "C1CCCCC1",
    "C1=CC2CC1C2",
    "O=S(=O)(N)c1ccccc1",
    "FC(F)(F)c1ccc(Cl)cc1",
    "[NH4+]",
    "[O-]C(=O)C",
    "C#N",
    "CN1CCOCC1",
    "c1ccccc1-c1ccccc1",
    "COc1cc(CNC(=O)CCC)ccc1Br",
};

}  // namespace

TEST_CASE("parse: methane") {
  Molecule m = parse_smiles("C");
  CHECK(m.atom_count() == 1);
  CHECK(m.bond_count() == 0);
  CHECK(m.atom(0).element == Element::C);
  CHECK(m.atom(0).hydrogens == 4);
}

TEST_CASE("parse: benzene") {
  Molecule m = parse_smiles("c1ccccc1");
  CHECK(m.atom_count() == 6);
  CHECK(m.bond_count() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(m.atom(i).aromatic);
    CHECK(m.atom(i).element == Element::C);
    CHECK(m.atom(i).hydrogens == 1);
  }
  for (int b = 0; b < 6; ++b) CHECK(m.bond(b).order == BondOrder::Aromatic);
}

TEST_CASE("parse: acetamide matches a hand-constructed reference graph") {
  Molecule m = parse_smiles("CC(=O)N");
  CHECK(m.atom_count() == 4);
  CHECK(m.bond_count() == 3);

  GraphBuilder ref;
  int c1 = ref.add_atom(Element::C);
  int c2 = ref.add_atom(Element::C);
  int o = ref.add_atom(Element::O);
  int n = ref.add_atom(Element::N);
  ref.add_bond(c1, c2, BondOrder::Single);
  ref.add_bond(c2, o, BondOrder::Double);
  ref.add_bond(c2, n, BondOrder::Single);
  Molecule expect = ref.sanitize();
  CHECK(isomorphic(m, expect));
  CHECK(write_smiles(m) == write_smiles(expect));

  // bond orders as stated: C-C single, C=O double, C-N single
  int cc = 0, co = 0, cn = 0;
  for (const Bond& b : m.bonds()) {
    Element ea = m.atom(b.a).element, eb = m.atom(b.b).element;
    if (ea == Element::C && eb == Element::C && b.order == BondOrder::Single) ++cc;
    if ((ea == Element::O || eb == Element::O) && b.order == BondOrder::Double) ++co;
    if ((ea == Element::N || eb == Element::N) && b.order == BondOrder::Single) ++cn;
  }
  CHECK(cc == 1);
  CHECK(co == 1);
  CHECK(cn == 1);
}

TEST_CASE("parse: hydrogen and charge handling") {
  Molecule ammonium = parse_smiles("[NH4+]");
  CHECK(ammonium.atom(0).charge == 1);
  CHECK(ammonium.atom(0).hydrogens == 4);

  Molecule acetate = parse_smiles("[O-]C(=O)C");
  CHECK(acetate.atom(0).charge == -1);
  CHECK(acetate.atom(0).hydrogens == 0);

  Molecule pyrrole = parse_smiles("c1cc[nH]c1");
  int n_idx = -1;
  for (int i = 0; i < pyrrole.atom_count(); ++i) {
    if (pyrrole.atom(i).element == Element::N) n_idx = i;
  }
  REQUIRE(n_idx >= 0);
  CHECK(pyrrole.atom(n_idx).hydrogens == 1);
  CHECK_FALSE(pyrrole.pi_matched(n_idx));

  Molecule pyridine = parse_smiles("c1ccncc1");
  for (int i = 0; i < pyridine.atom_count(); ++i) {
    if (pyridine.atom(i).element == Element::N) {
      CHECK(pyridine.atom(i).hydrogens == 0);
      CHECK(pyridine.pi_matched(i));
    }
  }
}

TEST_CASE("parse: error positions and categories") {
  CHECK_THROWS_AS(parse_smiles("C)C"), ParseError);
  CHECK_THROWS_AS(parse_smiles("C1CC"), ParseError);        // unmatched ring closure
  CHECK_THROWS_AS(parse_smiles("CXq"), ParseError);         // unknown element
  CHECK_THROWS_AS(parse_smiles("C.C"), ParseError);         // disconnected
  CHECK_THROWS_AS(parse_smiles("[C@H](C)(C)C"), ParseError);  // stereo unsupported
  CHECK_THROWS_AS(parse_smiles("[13C]"), ParseError);       // isotopes unsupported
  CHECK_THROWS_AS(parse_smiles("C=(C)C"), ParseError);
  CHECK_THROWS_AS(parse_smiles(""), ParseError);

  CHECK_THROWS_AS(parse_smiles("CC(C#"), ParseError);
  try {
    parse_smiles("CC#");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.position() == 2);
  }
  try {
    parse_smiles("CC1CC");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.position() == 2);  // the unmatched opening digit
  }

  // valence violations surface as MoleculeError from sanitization
  CHECK_THROWS_AS(parse_smiles("C(C)(C)(C)(C)C"), MoleculeError);
  CHECK_THROWS_AS(parse_smiles("O=C=O=C"), MoleculeError);
  // aromatic ring that cannot alternate
  CHECK_THROWS_AS(parse_smiles("c1ccnc1"), MoleculeError);
  // aromatic bond outside a ring
  CHECK_THROWS_AS(parse_smiles("c1ccccc1c1ccccc1"), MoleculeError);
  // aromatic atom not in a ring
  CHECK_THROWS_AS(parse_smiles("Cc"), MoleculeError);
}

TEST_CASE("parse: heavy-atom cap") {
  std::string big(51, 'C');
  CHECK_THROWS_AS(parse_smiles(big), MoleculeError);
  std::string ok(50, 'C');
  CHECK(parse_smiles(ok).atom_count() == 50);
  CHECK_THROWS_AS(parse_smiles("CCC", 2), MoleculeError);
}

TEST_CASE("write: methane graph emits C") {
  GraphBuilder b;
  b.add_atom(Element::C);
  CHECK(write_smiles(b.sanitize()) == "C");
}

TEST_CASE("write: benzene emits one string for every atom ordering") {
  Molecule m = parse_smiles("c1ccccc1");
  std::string expect = write_smiles(m);
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    Molecule p = permuted(m, random_permutation(m.atom_count(), rng));
    CHECK(write_smiles(p) == expect);
  }
}

TEST_CASE("write: 100 permutations of a 20-atom molecule give 1 string") {
  Molecule m = parse_smiles("COc1cc(CNC(=O)CCCC)ccc1OCCC");
  REQUIRE(m.atom_count() == 20);
  Molecule m2 = parse_smiles("O=S(=O)(Nc1ccccc1)c1ccc(CC(C)C)cc1");
  REQUIRE(m2.atom_count() == 20);
  for (Molecule mol : {m, m2}) {
    Rng rng(12345);
    std::set<std::string> outs;
    for (int t = 0; t < 100; ++t) {
      Molecule p = permuted(mol, random_permutation(mol.atom_count(), rng));
      outs.insert(write_smiles(p));
    }
    CHECK(outs.size() == 1);
  }
}

TEST_CASE("round-trip isomorphism and canonical idempotence over corpus") {
  Rng rng(99);
  for (const std::string& smi : kCorpus) {
    CAPTURE(smi);
    Molecule m = parse_smiles(smi);
    std::string canon = write_smiles(m);
    Molecule back = parse_smiles(canon);
    CHECK(isomorphic(m, back));
    CHECK(write_smiles(back) == canon);
    // permuted forms canonicalize identically
    Molecule p = permuted(m, random_permutation(m.atom_count(), rng));
    CHECK(write_smiles(p) == canon);
  }
}

TEST_CASE("canonical_ranks basics") {
  Molecule one = parse_smiles("C");
  CHECK(canonical_ranks(one) == std::vector<int>{0});

  Molecule ethane = parse_smiles("CC");
  auto r = canonical_ranks(ethane);
  CHECK(r[0] == r[1]);

  Rng rng(5);
  for (const std::string& smi : {"CC(=O)N", "c1ccc2ccccc2c1", "CC(C)(C)C"}) {
    Molecule m = parse_smiles(smi);
    auto base = canonical_ranks(m);
    std::multiset<int> base_set(base.begin(), base.end());
    Molecule p = permuted(m, random_permutation(m.atom_count(), rng));
    auto pr = canonical_ranks(p);
    CHECK(std::multiset<int>(pr.begin(), pr.end()) == base_set);
  }
}

TEST_CASE("descriptors: methane, benzene, butane") {
  DescriptorSet methane = descriptors(parse_smiles("C"));
  CHECK(methane.molecular_weight == doctest::Approx(16.04).epsilon(0.001));
  CHECK(methane.heavy_atoms == 1);
  CHECK(methane.ring_count == 0);
  CHECK(methane.largest_ring_size == 0);

  DescriptorSet benzene = descriptors(parse_smiles("c1ccccc1"));
  CHECK(benzene.ring_count == 1);
  CHECK(benzene.aromatic_ring_count == 1);
  CHECK(benzene.rotatable_bonds == 0);
  CHECK(benzene.largest_ring_size == 6);

  // independent enumeration of rotatable bonds for n-butane
  Molecule butane = parse_smiles("CCCC");
  int expected = 0;
  for (const Bond& b : butane.bonds()) {
    bool acyclic_single = b.order == BondOrder::Single;
    bool non_terminal = butane.degree(b.a) > 1 && butane.degree(b.b) > 1;
    if (acyclic_single && non_terminal) ++expected;
  }
  CHECK(expected == 1);
  CHECK(descriptors(butane).rotatable_bonds == expected);

  DescriptorSet naph = descriptors(parse_smiles("c1ccc2ccccc2c1"));
  CHECK(naph.ring_count == 2);
  CHECK(naph.aromatic_ring_count == 2);
  CHECK(naph.heteroatom_fraction == doctest::Approx(0.0));
}

TEST_CASE("fingerprint: determinism, invariance, discrimination") {
  Molecule m = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  BitVector f1 = fingerprint(m);
  BitVector f2 = fingerprint(m);
  CHECK(f1 == f2);
  CHECK(f1.count() > 0);

  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    Molecule p = permuted(m, random_permutation(m.atom_count(), rng));
    CHECK(fingerprint(p) == f1);
  }

  CHECK_FALSE(fingerprint(parse_smiles("C")) == fingerprint(parse_smiles("c1ccccc1")));
  CHECK_THROWS_AS(fingerprint(m, 4, 2048), MoleculeError);
  CHECK_THROWS_AS(fingerprint(m, 2, 100), MoleculeError);
}

TEST_CASE("valence safety: sanitized molecules respect the table") {
  for (const std::string& smi : kCorpus) {
    Molecule m = parse_smiles(smi);
    for (int i = 0; i < m.atom_count(); ++i) {
      const Atom& a = m.atom(i);
      int total = m.effective_valence(i) + a.hydrogens;
      CHECK(total <= max_allowed_valence(a.element, a.charge));
    }
  }
}
