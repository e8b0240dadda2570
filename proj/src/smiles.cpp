//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/smiles.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <numeric>
#include <map>
#include <optional>
#include <tuple>

namespace synthweaver {

namespace {

constexpr int kNoBond = -1;

int bond_code(BondOrder o) { return static_cast<int>(o); }

BondOrder resolve_order(int pending, const Atom& a, const Atom& b) {
  if (pending != kNoBond) return static_cast<BondOrder>(pending);
  if (a.aromatic && b.aromatic) return BondOrder::Aromatic;
  return BondOrder::Single;
}

struct OpenRing {
  int atom = -1;
  int order = kNoBond;
  std::size_t pos = 0;
};

bool parse_aromatic_symbol(char c, Element& out) {
  switch (c) {
    case 'b': out = Element::B; return true;
    case 'c': out = Element::C; return true;
    case 'n': out = Element::N; return true;
    case 'o': out = Element::O; return true;
    case 'p': out = Element::P; return true;
    case 's': out = Element::S; return true;
    default: return false;
  }
}

}  // namespace

RawParse parse_smiles_raw(std::string_view text, bool allow_dummy) {
  RawParse out;
  GraphBuilder& b = out.builder;

  std::array<std::optional<OpenRing>, 100> rings;
  std::vector<int> branch_stack;
  int prev = -1;
  int pending = kNoBond;
  std::size_t pending_pos = 0;
  std::size_t i = 0;

  auto finish_atom = [&](int idx, std::size_t pos) {
    if (prev >= 0) {
      BondOrder o = resolve_order(pending, b.atom(prev), b.atom(idx));
      if (b.bond_between(prev, idx) >= 0) throw ParseError(pos, "duplicate bond between atoms");
      b.add_bond(prev, idx, o);
    } else if (pending != kNoBond) {
      throw ParseError(pending_pos, "bond symbol before any atom");
    }
    pending = kNoBond;
    prev = idx;
  };

  auto close_or_open_ring = [&](int digit, std::size_t pos) {
    if (prev < 0) throw ParseError(pos, "ring closure before any atom");
    if (rings[digit].has_value()) {
      OpenRing o = *rings[digit];
      rings[digit].reset();
      if (o.atom == prev) throw ParseError(pos, "ring closure to the same atom");
      if (o.order != kNoBond && pending != kNoBond && o.order != pending)
        throw ParseError(pos, "conflicting bond orders on ring closure");
      int code = o.order != kNoBond ? o.order : pending;
      if (b.bond_between(o.atom, prev) >= 0)
        throw ParseError(pos, "ring closure duplicates an existing bond");
      b.add_bond(o.atom, prev, resolve_order(code, b.atom(o.atom), b.atom(prev)));
    } else {
      rings[digit] = OpenRing{prev, pending, pos};
    }
    pending = kNoBond;
  };

  while (i < text.size()) {
    char c = text[i];
    std::size_t pos = i;
    switch (c) {
      case '(': {
        if (prev < 0) throw ParseError(pos, "branch before any atom");
        if (pending != kNoBond) throw ParseError(pos, "bond symbol before '('");
        branch_stack.push_back(prev);
        ++i;
        break;
      }
      case ')': {
        if (pending != kNoBond) throw ParseError(pos, "dangling bond symbol before ')'");
        if (branch_stack.empty()) throw ParseError(pos, "unmatched ')'");
        prev = branch_stack.back();
        branch_stack.pop_back();
        ++i;
        break;
      }
      case '-':
      case '=':
      case '#':
      case ':': {
        if (pending != kNoBond) throw ParseError(pos, "two bond symbols in a row");
        if (c == '-') pending = static_cast<int>(BondOrder::Single);
        if (c == '=') pending = static_cast<int>(BondOrder::Double);
        if (c == '#') pending = static_cast<int>(BondOrder::Triple);
        if (c == ':') pending = static_cast<int>(BondOrder::Aromatic);
        pending_pos = pos;
        ++i;
        break;
      }
      case '%': {
        if (i + 2 >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i + 1])) ||
            !std::isdigit(static_cast<unsigned char>(text[i + 2])))
          throw ParseError(pos, "'%' ring closure needs two digits");
        int digit = (text[i + 1] - '0') * 10 + (text[i + 2] - '0');
        close_or_open_ring(digit, pos);
        i += 3;
        break;
      }
      case '.':
        throw ParseError(pos, "disconnected input ('.' separator not supported)");
      case '[': {
        ++i;
        if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
          throw ParseError(i, "isotopes not supported");
        bool aromatic = false;
        bool dummy = false;
        Element elem = Element::C;
        if (i < text.size() && text[i] == '*') {
          dummy = true;
          ++i;
        } else if (i < text.size() && std::islower(static_cast<unsigned char>(text[i]))) {
          if (!parse_aromatic_symbol(text[i], elem))
            throw ParseError(i, std::string("unknown element '") + text[i] + "'");
          aromatic = true;
          ++i;
        } else {
          if (i >= text.size() || !std::isupper(static_cast<unsigned char>(text[i])))
            throw ParseError(i, "expected element symbol");
          std::size_t sym_pos = i;
          std::string sym(1, text[i]);
          ++i;
          if (i < text.size() && std::islower(static_cast<unsigned char>(text[i]))) {
            Element two;
            if (element_from_symbol(sym + text[i], two)) {
              sym += text[i];
              ++i;
            }
          }
          if (!element_from_symbol(sym, elem))
            throw ParseError(sym_pos, "unknown element '" + sym + "'");
        }
        if (i < text.size() && (text[i] == '@'))
          throw ParseError(i, "stereochemistry not supported");
        int hcount = 0;
        if (i < text.size() && text[i] == 'H') {
          ++i;
          hcount = 1;
          if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            hcount = text[i] - '0';
            ++i;
          }
        }
        int charge = 0;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
          int sign = text[i] == '+' ? 1 : -1;
          char sc = text[i];
          ++i;
          int mag = 1;
          if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            mag = text[i] - '0';
            ++i;
          } else {
            while (i < text.size() && text[i] == sc) {
              ++mag;
              ++i;
            }
          }
          charge = sign * mag;
        }
        if (i >= text.size() || text[i] != ']') throw ParseError(i, "expected ']'");
        ++i;
        if (dummy) {
          if (!allow_dummy) throw ParseError(pos, "unknown element '*'");
          int idx = b.add_atom(Element::C, 0, false, 0);
          out.dummies.push_back(idx);
          finish_atom(idx, pos);
        } else {
          int idx = b.add_atom(elem, charge, aromatic, hcount);
          finish_atom(idx, pos);
        }
        break;
      }
      case '*': {
        if (!allow_dummy) throw ParseError(pos, "unknown element '*'");
        int idx = b.add_atom(Element::C, 0, false, 0);
        out.dummies.push_back(idx);
        finish_atom(idx, pos);
        ++i;
        break;
      }
      default: {
        if (std::isdigit(static_cast<unsigned char>(c))) {
          close_or_open_ring(c - '0', pos);
          ++i;
          break;
        }
        if (std::islower(static_cast<unsigned char>(c))) {
          Element elem;
          if (!parse_aromatic_symbol(c, elem))
            throw ParseError(pos, std::string("unknown element '") + c + "'");
          int idx = b.add_atom(elem, 0, true, -1);
          finish_atom(idx, pos);
          ++i;
          break;
        }
        if (std::isupper(static_cast<unsigned char>(c))) {
          std::string sym(1, c);
          std::size_t len = 1;
          if (i + 1 < text.size() && ((c == 'C' && text[i + 1] == 'l') ||
                                      (c == 'B' && text[i + 1] == 'r'))) {
            sym += text[i + 1];
            len = 2;
          }
          Element elem;
          if (!element_from_symbol(sym, elem))
            throw ParseError(pos, "unknown element '" + sym + "'");
          int idx = b.add_atom(elem, 0, false, -1);
          finish_atom(idx, pos);
          i += len;
          break;
        }
        throw ParseError(pos, std::string("unexpected character '") + c + "'");
      }
    }
  }

  if (!branch_stack.empty()) throw ParseError(text.size(), "unclosed branch '('");
  if (pending != kNoBond) throw ParseError(pending_pos, "dangling bond symbol");
  for (const auto& r : rings) {
    if (r.has_value()) throw ParseError(r->pos, "unmatched ring closure");
  }
  if (b.atom_count() == 0) throw ParseError(0, "empty SMILES");
  return out;
}

Molecule parse_smiles(std::string_view text, int max_atoms) {
  RawParse raw = parse_smiles_raw(text, false);
  return raw.builder.sanitize(max_atoms);
}

// ---------------------------------------------------------------------------
// canonical ranking
// ---------------------------------------------------------------------------

namespace {

std::vector<int> initial_ranks(const Molecule& m) {
  int n = m.atom_count();
  using Key = std::tuple<int, int, int, int, int>;
  std::vector<Key> keys(n);
  for (int i = 0; i < n; ++i) {
    const Atom& a = m.atom(i);
    keys[i] = {static_cast<int>(a.element), a.charge, a.aromatic ? 1 : 0, m.degree(i),
               a.hydrogens};
  }
  std::vector<Key> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> ranks(n);
  for (int i = 0; i < n; ++i) {
    ranks[i] = static_cast<int>(
        std::lower_bound(sorted.begin(), sorted.end(), keys[i]) - sorted.begin());
  }
  return ranks;
}

// One pass of neighborhood refinement; returns true if classes changed.
// Keys are fixed-size arrays: own rank plus up to six sorted neighbor
// (rank, order) codes, so no per-atom heap allocation happens.
bool refine_step(const Molecule& m, std::vector<int>& ranks) {
  int n = m.atom_count();
  using Key = std::array<int, 8>;
  std::vector<Key> keys(n);
  for (int i = 0; i < n; ++i) {
    Key& k = keys[i];
    k.fill(-1);
    k[0] = ranks[i];
    int at = 1;
    std::array<int, 8> nb{};
    int deg = 0;
    for (const Neighbor& x : m.neighbors(i)) {
      nb[deg++] = ranks[x.atom] * 8 + bond_code(m.bond(x.bond).order);
    }
    std::sort(nb.begin(), nb.begin() + deg);
    for (int d = 0; d < deg && at < 8; ++d) k[at++] = nb[d];
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  bool changed = false;
  int next_rank = -1;
  for (int p = 0; p < n; ++p) {
    if (p == 0 || keys[order[p]] != keys[order[p - 1]]) ++next_rank;
    if (ranks[order[p]] != next_rank) changed = true;
    ranks[order[p]] = next_rank;
  }
  return changed;
}

void refine(const Molecule& m, std::vector<int>& ranks) {
  while (refine_step(m, ranks)) {
  }
}

bool discrete(const std::vector<int>& ranks) {
  int n = static_cast<int>(ranks.size());
  std::vector<bool> seen(n, false);
  for (int r : ranks) {
    if (seen[r]) return false;
    seen[r] = true;
  }
  return true;
}

// ---------------------------------------------------------------------------
// SMILES emission for a fixed discrete labeling
// ---------------------------------------------------------------------------

// Hydrogen count a bare (bracket-free) parse would derive for this atom, or
// -1 when a bare token cannot reproduce the atom.
int predicted_h_if_bare(const Molecule& m, int i) {
  const Atom& a = m.atom(i);
  if (a.charge != 0) return -1;
  int sigma = m.sigma_valence(i);
  auto vals = allowed_valences(a.element, 0);
  int eff = sigma;
  if (a.aromatic) {
    int target0 = -1;
    for (int v : vals) {
      if (v >= sigma) {
        target0 = v;
        break;
      }
    }
    if (target0 < 0) return -1;
    bool candidate = (target0 - sigma) >= 1;
    if (candidate != m.pi_matched(i)) return -1;
    eff = sigma + (candidate ? 1 : 0);
  }
  for (int v : vals) {
    if (v >= eff) return v - eff;
  }
  return -1;
}

std::string atom_token(const Molecule& m, int i) {
  const Atom& a = m.atom(i);
  std::string sym = element_symbol(a.element);
  if (a.aromatic) {
    for (char& c : sym) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (predicted_h_if_bare(m, i) == a.hydrogens) return sym;
  std::string s = "[" + sym;
  if (a.hydrogens == 1) {
    s += "H";
  } else if (a.hydrogens > 1) {
    s += "H" + std::to_string(static_cast<int>(a.hydrogens));
  }
  if (a.charge == 1) s += "+";
  if (a.charge == -1) s += "-";
  if (a.charge >= 2) s += "+" + std::to_string(static_cast<int>(a.charge));
  if (a.charge <= -2) s += "-" + std::to_string(-static_cast<int>(a.charge));
  return s + "]";
}

std::string bond_token(const Molecule& m, int bond) {
  const Bond& b = m.bond(bond);
  switch (b.order) {
    case BondOrder::Single:
      // explicit '-' so two adjacent aromatic tokens do not read as an
      // aromatic bond (e.g. the biaryl bond of biphenyl)
      return (m.atom(b.a).aromatic && m.atom(b.b).aromatic) ? "-" : "";
    case BondOrder::Double:
      return "=";
    case BondOrder::Triple:
      return "#";
    case BondOrder::Aromatic:
      return "";
  }
  return "";
}

std::string emit_smiles(const Molecule& m, const std::vector<int>& rank, int root) {
  int n = m.atom_count();
  std::vector<int> preorder(n, -1);
  std::vector<std::vector<std::pair<int, int>>> children(n);  // (child, bond)
  std::vector<bool> bond_used(m.bond_count(), false);
  std::vector<int> ring_bonds;
  int counter = 0;

  std::function<void(int, int)> dfs = [&](int u, int parent_bond) {
    preorder[u] = counter++;
    std::vector<Neighbor> nbrs(m.neighbors(u).begin(), m.neighbors(u).end());
    std::sort(nbrs.begin(), nbrs.end(),
              [&](const Neighbor& x, const Neighbor& y) { return rank[x.atom] < rank[y.atom]; });
    for (const Neighbor& nb : nbrs) {
      if (nb.bond == parent_bond) continue;
      if (preorder[nb.atom] < 0) {
        bond_used[nb.bond] = true;
        children[u].push_back({nb.atom, nb.bond});
        dfs(nb.atom, nb.bond);
      } else if (!bond_used[nb.bond]) {
        bond_used[nb.bond] = true;
        ring_bonds.push_back(nb.bond);
      }
    }
  };
  dfs(root, -1);

  // ring tokens attach to both endpoints; openings sit at the earlier atom
  std::vector<std::vector<std::pair<int, int>>> ring_at(n);  // (far_preorder, bond)
  for (int b : ring_bonds) {
    int x = m.bond(b).a, y = m.bond(b).b;
    ring_at[x].push_back({preorder[y], b});
    ring_at[y].push_back({preorder[x], b});
  }
  for (auto& v : ring_at) std::sort(v.begin(), v.end());

  std::vector<int> digit_of(m.bond_count(), -1);
  std::vector<bool> digit_used(100, false);
  auto alloc_digit = [&]() {
    for (int d = 1; d < 100; ++d) {
      if (!digit_used[d]) {
        digit_used[d] = true;
        return d;
      }
    }
    throw MoleculeError("too many simultaneous ring closures");
  };
  auto digit_str = [](int d) {
    if (d < 10) return std::string(1, static_cast<char>('0' + d));
    return "%" + std::to_string(d);
  };

  std::string s;
  std::function<void(int)> emit = [&](int u) {
    s += atom_token(m, u);
    for (auto [far_pre, b] : ring_at[u]) {
      if (far_pre > preorder[u]) {
        int d = alloc_digit();
        digit_of[b] = d;
        s += bond_token(m, b);
        s += digit_str(d);
      } else {
        int d = digit_of[b];
        s += digit_str(d);
        digit_used[d] = false;
      }
    }
    for (std::size_t k = 0; k < children[u].size(); ++k) {
      auto [v, b] = children[u][k];
      bool last = (k + 1 == children[u].size());
      if (!last) s += "(";
      s += bond_token(m, b);
      emit(v);
      if (!last) s += ")";
    }
  };
  emit(root);
  return s;
}

// Enumerates every discrete labeling reachable by the cell-splitting
// procedure, emitting from every candidate root, and returns the smallest
// string. Candidate roots are the atoms of the first refined rank class, an
// isomorphism-invariant set, so the result depends only on the isomorphism
// class of the molecule.
void best_string_rec(const Molecule& m, std::vector<int> ranks,
                     const std::vector<int>& roots, std::string& best) {
  refine(m, ranks);
  int n = m.atom_count();
  if (discrete(ranks)) {
    for (int root : roots) {
      std::string s = emit_smiles(m, ranks, root);
      if (best.empty() || s < best) best = std::move(s);
    }
    return;
  }
  // first non-singleton class by class id
  int target = -1;
  {
    std::vector<int> count(n, 0);
    for (int r : ranks) ++count[r];
    for (int r = 0; r < n; ++r) {
      if (count[r] >= 2) {
        target = r;
        break;
      }
    }
  }
  for (int a = 0; a < n; ++a) {
    if (ranks[a] != target) continue;
    std::vector<int> split(n);
    for (int i = 0; i < n; ++i) split[i] = ranks[i] * 2 + (i == a ? 0 : 1);
    best_string_rec(m, std::move(split), roots, best);
  }
}

}  // namespace

std::vector<int> canonical_ranks(const Molecule& mol) {
  std::vector<int> ranks = initial_ranks(mol);
  refine(mol, ranks);
  return ranks;
}

std::string write_smiles(const Molecule& mol) {
  std::vector<int> ranks = initial_ranks(mol);
  refine(mol, ranks);
  std::vector<int> roots;
  for (int i = 0; i < mol.atom_count(); ++i) {
    if (ranks[i] == 0) roots.push_back(i);
  }
  std::string best;
  best_string_rec(mol, std::move(ranks), roots, best);
  return best;
}

}  // namespace synthweaver
