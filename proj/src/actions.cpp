//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/actions.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

#include "synthweaver/smiles.hpp"

namespace synthweaver {

namespace {

constexpr std::array<Element, 7> kGraphEditElements = {
    Element::C, Element::N, Element::O, Element::F, Element::S, Element::Cl, Element::Br};

bool disconnectable(const Molecule& m, int bond) {
  return m.bond(bond).order == BondOrder::Single && !m.bond_in_ring(bond);
}

}  // namespace

std::span<const Element> graph_edit_elements() { return kGraphEditElements; }

SearchSpace make_fragment_space(FragmentLibrary lib, int max_atoms) {
  SearchSpace s;
  s.kind = SpaceKind::Fragment;
  s.library = std::move(lib);
  s.max_atoms = max_atoms;
  return s;
}

SearchSpace make_graph_edit_space(int max_atoms) {
  SearchSpace s;
  s.kind = SpaceKind::GraphEdit;
  s.max_atoms = max_atoms;
  return s;
}

std::string Action::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::FragmentAttach:
      os << "attach frag=" << fragment_id << " at=" << fragment_atom << " host=" << host_atom;
      break;
    case Kind::Disconnect:
      os << "disconnect bond=" << bond << " keep=" << (keep_side == 0 ? "A" : "B");
      break;
    case Kind::AddAtom:
      os << "add_atom " << element_symbol(element) << " order=" << sigma_order(order)
         << " host=" << host_atom;
      break;
    case Kind::MutateAtom:
      os << "mutate_atom atom=" << atom << " to=" << element_symbol(element);
      break;
    case Kind::MutateBond:
      os << "mutate_bond bond=" << bond << " to=" << sigma_order(order);
      break;
    case Kind::DeleteAtom:
      os << "delete_atom atom=" << atom;
      break;
    case Kind::DeleteBond:
      os << "delete_bond bond=" << bond;
      break;
    case Kind::FuseRing:
      os << "fuse_ring size=" << ring_size << " aromatic=" << (ring_aromatic ? 1 : 0);
      if (bond >= 0) {
        os << " bond=" << bond;
      } else {
        os << " atom=" << atom;
      }
      break;
  }
  return os.str();
}

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw ActionError(std::string("illegal action: ") + msg);
}

Molecule finish(const GraphBuilder& b, int max_atoms) {
  try {
    return b.sanitize(max_atoms);
  } catch (const MoleculeError& e) {
    throw ActionError(std::string("illegal action: ") + e.what());
  }
}

Molecule apply_attach(const SearchSpace& space, const Molecule& mol, const Action& a) {
  require(a.fragment_id >= 0 && a.fragment_id < static_cast<int>(space.library.size()),
          "fragment id out of range");
  const Fragment& frag = space.library.fragments[a.fragment_id];
  require(a.host_atom >= 0 && a.host_atom < mol.atom_count(), "host atom out of range");
  require(std::find(frag.attachments.begin(), frag.attachments.end(), a.fragment_atom) !=
              frag.attachments.end(),
          "not an attachment atom");
  require(mol.atom(a.host_atom).hydrogens >= 1, "host atom has no free valence");
  require(mol.atom_count() + frag.mol.atom_count() <= space.max_atoms,
          "heavy-atom cap exceeded");

  GraphBuilder b = GraphBuilder::from(mol);
  int offset = mol.atom_count();
  for (int i = 0; i < frag.mol.atom_count(); ++i) {
    const Atom& fa = frag.mol.atom(i);
    b.add_atom(fa.element, fa.charge, fa.aromatic, fa.h_fixed ? fa.hydrogens : -1);
  }
  for (const Bond& fb : frag.mol.bonds()) b.add_bond(offset + fb.a, offset + fb.b, fb.order);
  b.consume_valence(a.host_atom, 1);
  b.consume_valence(offset + a.fragment_atom, 1);
  b.add_bond(a.host_atom, offset + a.fragment_atom, BondOrder::Single);
  return finish(b, space.max_atoms);
}

Molecule apply_disconnect(const SearchSpace& space, const Molecule& mol, const Action& a) {
  require(a.bond >= 0 && a.bond < mol.bond_count(), "bond out of range");
  require(disconnectable(mol, a.bond), "disconnect requires an acyclic single bond");
  const Bond& bd = mol.bond(a.bond);
  int keep_atom = a.keep_side == 0 ? bd.a : bd.b;
  GraphBuilder b = GraphBuilder::from(mol);
  b.release_valence(bd.a, 1);
  b.release_valence(bd.b, 1);
  b.remove_bond(a.bond);
  b.keep_component(keep_atom);
  return finish(b, space.max_atoms);
}

Molecule apply_add_atom(const SearchSpace& space, const Molecule& mol, const Action& a) {
  require(a.host_atom >= 0 && a.host_atom < mol.atom_count(), "host atom out of range");
  require(a.order != BondOrder::Aromatic, "cannot add an atom with an aromatic bond");
  int need = sigma_order(a.order);
  require(mol.atom(a.host_atom).hydrogens >= need, "host atom lacks free valence");
  require(max_allowed_valence(a.element, 0) >= need, "element cannot carry the bond order");
  require(mol.atom_count() + 1 <= space.max_atoms, "heavy-atom cap exceeded");
  GraphBuilder b = GraphBuilder::from(mol);
  b.consume_valence(a.host_atom, need);
  int idx = b.add_atom(a.element);
  b.add_bond(a.host_atom, idx, a.order);
  return finish(b, space.max_atoms);
}

Molecule apply_mutate_atom(const SearchSpace& space, const Molecule& mol, const Action& a) {
  require(a.atom >= 0 && a.atom < mol.atom_count(), "atom out of range");
  require(a.element != mol.atom(a.atom).element, "mutation to the same element");
  GraphBuilder b = GraphBuilder::from(mol);
  b.set_element(a.atom, a.element);
  return finish(b, space.max_atoms);
}

Molecule apply_mutate_bond(const SearchSpace& space, const Molecule& mol, const Action& a) {
  require(a.bond >= 0 && a.bond < mol.bond_count(), "bond out of range");
  const Bond& bd = mol.bond(a.bond);
  require(bd.order != BondOrder::Aromatic, "cannot mutate an aromatic bond");
  require(a.order != BondOrder::Aromatic, "cannot mutate to an aromatic bond");
  require(a.order != bd.order, "mutation to the same order");
  int delta = sigma_order(a.order) - sigma_order(bd.order);
  GraphBuilder b = GraphBuilder::from(mol);
  if (delta > 0) {
    require(mol.atom(bd.a).hydrogens >= delta && mol.atom(bd.b).hydrogens >= delta,
            "endpoints lack free valence");
    b.consume_valence(bd.a, delta);
    b.consume_valence(bd.b, delta);
  } else {
    b.release_valence(bd.a, -delta);
    b.release_valence(bd.b, -delta);
  }
  b.set_bond_order(a.bond, a.order);
  return finish(b, space.max_atoms);
}

Molecule apply_delete_atom(const SearchSpace& space, const Molecule& mol, const Action& a) {
  require(a.atom >= 0 && a.atom < mol.atom_count(), "atom out of range");
  require(mol.atom_count() >= 2, "cannot delete the only atom");
  GraphBuilder b = GraphBuilder::from(mol);
  for (const Neighbor& nb : mol.neighbors(a.atom)) {
    b.release_valence(nb.atom, sigma_order(mol.bond(nb.bond).order));
  }
  b.remove_atom(a.atom);

  auto comps = b.components();
  if (comps.size() > 1) {
    // keep the largest component; ties resolved by lowest canonical string
    std::size_t best_size = 0;
    for (const auto& c : comps) best_size = std::max(best_size, c.size());
    int keep_rep = -1;
    std::string best_str;
    for (const auto& c : comps) {
      if (c.size() != best_size) continue;
      GraphBuilder sub = b;
      sub.keep_component(c[0]);
      std::string s = write_smiles(finish(sub, space.max_atoms));
      if (keep_rep < 0 || s < best_str) {
        keep_rep = c[0];
        best_str = s;
      }
    }
    b.keep_component(keep_rep);
  }
  return finish(b, space.max_atoms);
}

Molecule apply_delete_bond(const SearchSpace& space, const Molecule& mol, const Action& a) {
  require(a.bond >= 0 && a.bond < mol.bond_count(), "bond out of range");
  require(mol.bond_in_ring(a.bond), "deleting this bond would disconnect the molecule");
  const Bond& bd = mol.bond(a.bond);
  GraphBuilder b = GraphBuilder::from(mol);
  b.release_valence(bd.a, sigma_order(bd.order));
  b.release_valence(bd.b, sigma_order(bd.order));
  b.remove_bond(a.bond);
  return finish(b, space.max_atoms);
}

Molecule apply_fuse_ring(const SearchSpace& space, const Molecule& mol, const Action& a) {
  require(a.ring_size == 5 || a.ring_size == 6, "ring size must be 5 or 6");
  require((a.bond >= 0) != (a.atom >= 0), "exactly one anchor required");
  GraphBuilder b = GraphBuilder::from(mol);
  BondOrder new_bond = a.ring_aromatic ? BondOrder::Aromatic : BondOrder::Single;
  if (a.bond >= 0) {
    require(a.bond < mol.bond_count(), "bond out of range");
    const Bond& bd = mol.bond(a.bond);
    int added = a.ring_size - 2;
    require(mol.atom_count() + added <= space.max_atoms, "heavy-atom cap exceeded");
    if (a.ring_aromatic) {
      require(bd.order == BondOrder::Single || bd.order == BondOrder::Aromatic,
              "aromatic fusion needs a single or aromatic anchor bond");
      b.set_aromatic(bd.a, true);
      b.set_aromatic(bd.b, true);
      b.set_bond_order(a.bond, BondOrder::Aromatic);
    }
    b.consume_valence(bd.a, 1);
    b.consume_valence(bd.b, 1);
    int prev = bd.a;
    for (int k = 0; k < added; ++k) {
      int idx = b.add_atom(Element::C, 0, a.ring_aromatic);
      b.add_bond(prev, idx, new_bond);
      prev = idx;
    }
    b.add_bond(prev, bd.b, new_bond);
  } else {
    require(a.atom < mol.atom_count(), "atom out of range");
    int added = a.ring_size - 1;
    require(mol.atom_count() + added <= space.max_atoms, "heavy-atom cap exceeded");
    if (a.ring_aromatic) b.set_aromatic(a.atom, true);
    b.consume_valence(a.atom, 2);
    int prev = a.atom;
    for (int k = 0; k < added; ++k) {
      int idx = b.add_atom(Element::C, 0, a.ring_aromatic);
      b.add_bond(prev, idx, new_bond);
      prev = idx;
    }
    b.add_bond(prev, a.atom, new_bond);
  }
  return finish(b, space.max_atoms);
}

std::vector<Action> generate_candidates(const SearchSpace& space, const Molecule& mol) {
  std::vector<Action> out;
  std::vector<int> ranks = canonical_ranks(mol);
  int n = mol.atom_count();

  auto bond_key = [&](int bond) {
    const Bond& bd = mol.bond(bond);
    int ra = ranks[bd.a], rb = ranks[bd.b];
    return std::tuple(std::min(ra, rb), std::max(ra, rb), static_cast<int>(bd.order),
                      mol.bond_in_ring(bond) ? 1 : 0);
  };

  if (space.kind == SpaceKind::Fragment) {
    // attach: host free-valence classes x fragment attachment classes
    std::set<int> host_classes;
    for (int i = 0; i < n; ++i) {
      if (mol.atom(i).hydrogens < 1) continue;
      if (!host_classes.insert(ranks[i]).second) continue;
      for (int f = 0; f < static_cast<int>(space.library.size()); ++f) {
        const Fragment& frag = space.library.fragments[f];
        if (n + frag.mol.atom_count() > space.max_atoms) continue;
        std::set<int> frag_classes;
        for (std::size_t k = 0; k < frag.attachments.size(); ++k) {
          if (!frag_classes.insert(frag.attachment_class[k]).second) continue;
          Action a;
          a.kind = Action::Kind::FragmentAttach;
          a.fragment_id = f;
          a.host_atom = i;
          a.fragment_atom = frag.attachments[k];
          out.push_back(a);
        }
      }
    }
    // two disconnect sides per bridge bond
    for (int bd = 0; bd < mol.bond_count(); ++bd) {
      if (!disconnectable(mol, bd)) continue;
      for (int side = 0; side < 2; ++side) {
        Action a;
        a.kind = Action::Kind::Disconnect;
        a.bond = bd;
        a.keep_side = side;
        out.push_back(a);
      }
    }
    return out;
  }

  // graph-edit space
  std::set<std::tuple<int, int, int>> add_seen;
  std::set<std::tuple<int, int>> mutate_atom_seen;
  std::set<std::tuple<std::tuple<int, int, int, int>, int>> mutate_bond_seen;
  std::set<int> delete_atom_seen;
  std::set<std::tuple<int, int, int, int>> delete_bond_seen;
  std::set<std::tuple<std::tuple<int, int, int, int>, int, int>> fuse_bond_seen;
  std::set<std::tuple<int, int, int>> fuse_atom_seen;

  for (int i = 0; i < n; ++i) {
    const Atom& at = mol.atom(i);
    // AddAtom
    if (n + 1 <= space.max_atoms) {
      for (Element e : kGraphEditElements) {
        for (BondOrder o : {BondOrder::Single, BondOrder::Double, BondOrder::Triple}) {
          int need = sigma_order(o);
          if (at.hydrogens < need || max_allowed_valence(e, 0) < need) continue;
          if (!add_seen.insert({ranks[i], static_cast<int>(e), need}).second) continue;
          Action a;
          a.kind = Action::Kind::AddAtom;
          a.host_atom = i;
          a.element = e;
          a.order = o;
          out.push_back(a);
        }
      }
    }
    // MutateAtom
    for (Element e : kGraphEditElements) {
      if (e == at.element) continue;
      if (!mutate_atom_seen.insert({ranks[i], static_cast<int>(e)}).second) continue;
      Action a;
      a.kind = Action::Kind::MutateAtom;
      a.atom = i;
      a.element = e;
      out.push_back(a);
    }
    // DeleteAtom
    if (n >= 2 && delete_atom_seen.insert(ranks[i]).second) {
      Action a;
      a.kind = Action::Kind::DeleteAtom;
      a.atom = i;
      out.push_back(a);
    }
    // FuseRing through an atom
    if (at.hydrogens >= 2) {
      for (int size : {5, 6}) {
        if (n + size - 1 > space.max_atoms) continue;
        for (int arom = 0; arom < 2; ++arom) {
          if (!fuse_atom_seen.insert({ranks[i], size, arom}).second) continue;
          Action a;
          a.kind = Action::Kind::FuseRing;
          a.atom = i;
          a.ring_size = size;
          a.ring_aromatic = arom != 0;
          out.push_back(a);
        }
      }
    }
  }

  for (int bd = 0; bd < mol.bond_count(); ++bd) {
    const Bond& bb = mol.bond(bd);
    // MutateBond
    if (bb.order != BondOrder::Aromatic) {
      for (BondOrder o : {BondOrder::Single, BondOrder::Double, BondOrder::Triple}) {
        if (o == bb.order) continue;
        int delta = sigma_order(o) - sigma_order(bb.order);
        if (delta > 0 &&
            (mol.atom(bb.a).hydrogens < delta || mol.atom(bb.b).hydrogens < delta))
          continue;
        if (!mutate_bond_seen.insert({bond_key(bd), sigma_order(o)}).second) continue;
        Action a;
        a.kind = Action::Kind::MutateBond;
        a.bond = bd;
        a.order = o;
        out.push_back(a);
      }
    }
    // DeleteBond (ring bonds only; aromatic rings cannot lose a bond)
    if (mol.bond_in_ring(bd) && bb.order != BondOrder::Aromatic &&
        delete_bond_seen.insert(bond_key(bd)).second) {
      Action a;
      a.kind = Action::Kind::DeleteBond;
      a.bond = bd;
      out.push_back(a);
    }
    // FuseRing on a bond
    bool ends_free =
        mol.atom(bb.a).hydrogens >= 1 && mol.atom(bb.b).hydrogens >= 1;
    if (ends_free) {
      for (int size : {5, 6}) {
        if (mol.atom_count() + size - 2 > space.max_atoms) continue;
        for (int arom = 0; arom < 2; ++arom) {
          if (arom != 0 && bb.order != BondOrder::Single && bb.order != BondOrder::Aromatic)
            continue;
          if (!fuse_bond_seen.insert({bond_key(bd), size, arom}).second) continue;
          Action a;
          a.kind = Action::Kind::FuseRing;
          a.bond = bd;
          a.ring_size = size;
          a.ring_aromatic = arom != 0;
          out.push_back(a);
        }
      }
    }
  }
  return out;
}

}  // namespace

Molecule apply_action(const SearchSpace& space, const Molecule& mol, const Action& action) {
  switch (action.kind) {
    case Action::Kind::FragmentAttach:
      require(space.kind == SpaceKind::Fragment, "attach outside a fragment space");
      return apply_attach(space, mol, action);
    case Action::Kind::Disconnect:
      return apply_disconnect(space, mol, action);
    case Action::Kind::AddAtom:
      return apply_add_atom(space, mol, action);
    case Action::Kind::MutateAtom:
      return apply_mutate_atom(space, mol, action);
    case Action::Kind::MutateBond:
      return apply_mutate_bond(space, mol, action);
    case Action::Kind::DeleteAtom:
      return apply_delete_atom(space, mol, action);
    case Action::Kind::DeleteBond:
      return apply_delete_bond(space, mol, action);
    case Action::Kind::FuseRing:
      return apply_fuse_ring(space, mol, action);
  }
  throw ActionError("illegal action: unknown kind");
}

std::vector<std::pair<Action, Molecule>> enumerate_with_results(const SearchSpace& space,
                                                                const Molecule& mol) {
  std::vector<Action> candidates = generate_candidates(space, mol);
  std::sort(candidates.begin(), candidates.end());
  std::vector<std::pair<Action, Molecule>> out;
  out.reserve(candidates.size());
  for (const Action& a : candidates) {
    try {
      out.emplace_back(a, apply_action(space, mol, a));
    } catch (const ActionError&) {
      // structurally proposed but chemically illegal; skip
    }
  }
  return out;
}

std::vector<Action> enumerate_actions(const SearchSpace& space, const Molecule& mol) {
  auto pairs = enumerate_with_results(space, mol);
  std::vector<Action> out;
  out.reserve(pairs.size());
  for (auto& [a, m] : pairs) out.push_back(a);
  return out;
}

Molecule random_molecule(const SearchSpace& space, Rng& rng, int n_init) {
  constexpr int kMaxRestarts = 50;
  Molecule best;
  int best_steps = -1;
  for (int attempt = 0; attempt < kMaxRestarts; ++attempt) {
    Molecule mol;
    if (space.kind == SpaceKind::Fragment) {
      if (space.library.empty()) throw MoleculeError("fragment space has an empty library");
      std::size_t idx = rng.next_below(space.library.size());
      mol = space.library.fragments[idx].mol;
    } else {
      GraphBuilder b;
      b.add_atom(Element::C);
      mol = b.sanitize(space.max_atoms);
    }
    int done = 0;
    while (done < n_init) {
      std::vector<Action> candidates = generate_candidates(space, mol);
      std::sort(candidates.begin(), candidates.end());
      bool stepped = false;
      while (!candidates.empty()) {
        std::size_t pick = rng.next_below(candidates.size());
        try {
          mol = apply_action(space, mol, candidates[pick]);
          stepped = true;
          break;
        } catch (const ActionError&) {
          candidates.erase(candidates.begin() + static_cast<long>(pick));
        }
      }
      if (!stepped) break;  // dead end; restart the draw
      ++done;
    }
    if (done == n_init) return mol;
    if (done > best_steps) {
      best_steps = done;
      best = mol;
    }
  }
  return best;
}

}  // namespace synthweaver
