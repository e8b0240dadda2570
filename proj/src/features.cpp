//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/features.hpp"

#include <algorithm>

namespace synthweaver {

namespace {

std::uint64_t fnv_str(std::uint64_t h, std::string_view s) {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

void fill_node_row(Eigen::MatrixXd& m, int row, const Molecule& mol, int atom) {
  const Atom& a = mol.atom(atom);
  int col = 0;
  m(row, col + static_cast<int>(a.element)) = 1.0;
  col += kElementCount;
  m(row, col + std::min(mol.degree(atom), 4)) = 1.0;
  col += 5;
  m(row, col++) = static_cast<double>(a.charge);
  m(row, col++) = a.aromatic ? 1.0 : 0.0;
  m(row, col + std::min<int>(a.hydrogens, 4)) = 1.0;
}

void fill_edge_row(Eigen::MatrixXd& m, int row, const Molecule& mol, int bond) {
  const Bond& b = mol.bond(bond);
  int order_idx = 0;
  switch (b.order) {
    case BondOrder::Single: order_idx = 0; break;
    case BondOrder::Double: order_idx = 1; break;
    case BondOrder::Triple: order_idx = 2; break;
    case BondOrder::Aromatic: order_idx = 3; break;
  }
  m(row, order_idx) = 1.0;
  m(row, 4) = mol.bond_in_ring(bond) ? 1.0 : 0.0;
}

}  // namespace

std::uint64_t FeatureSchema::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv_str(h, version);
  h = fnv_str(h, "node:element10|degree5|charge|aromatic|h5");
  h = fnv_str(h, "edge:order4|ring1");
  return h;
}

GraphFeatures featurize(const Molecule& mol, const FeatureSchema& schema) {
  GraphFeatures g;
  int n = mol.atom_count();
  int e = 2 * mol.bond_count();
  g.nodes = Eigen::MatrixXd::Zero(n, schema.node_dim());
  g.edge_feats = Eigen::MatrixXd::Zero(e, schema.edge_dim());
  g.edge_src.reserve(e);
  g.edge_dst.reserve(e);
  g.reverse_edge.resize(e);
  for (int i = 0; i < n; ++i) fill_node_row(g.nodes, i, mol, i);
  for (int b = 0; b < mol.bond_count(); ++b) {
    const Bond& bd = mol.bond(b);
    fill_edge_row(g.edge_feats, 2 * b, mol, b);
    fill_edge_row(g.edge_feats, 2 * b + 1, mol, b);
    g.edge_src.push_back(bd.a);
    g.edge_dst.push_back(bd.b);
    g.edge_src.push_back(bd.b);
    g.edge_dst.push_back(bd.a);
    g.reverse_edge[2 * b] = 2 * b + 1;
    g.reverse_edge[2 * b + 1] = 2 * b;
  }
  return g;
}

BatchGraph batch_featurize(std::span<const Molecule> mols, const FeatureSchema& schema) {
  BatchGraph batch;
  batch.num_graphs = static_cast<int>(mols.size());
  batch.node_dim = schema.node_dim();
  int total_nodes = 0, total_edges = 0;
  for (const Molecule& m : mols) {
    total_nodes += m.atom_count();
    total_edges += 2 * m.bond_count();
  }
  batch.nodes = Eigen::MatrixXd::Zero(total_nodes, schema.node_dim());
  batch.edge_inputs =
      Eigen::MatrixXd::Zero(total_edges, schema.node_dim() + schema.edge_dim());
  batch.edge_src.reserve(total_edges);
  batch.edge_dst.reserve(total_edges);
  batch.reverse_edge.reserve(total_edges);
  batch.node_graph.reserve(total_nodes);

  int node_base = 0, edge_base = 0;
  for (int gi = 0; gi < batch.num_graphs; ++gi) {
    GraphFeatures g = featurize(mols[gi], schema);
    int n = static_cast<int>(g.nodes.rows());
    int e = static_cast<int>(g.edge_feats.rows());
    batch.nodes.middleRows(node_base, n) = g.nodes;
    for (int k = 0; k < n; ++k) batch.node_graph.push_back(gi);
    for (int k = 0; k < e; ++k) {
      batch.edge_inputs.block(edge_base + k, 0, 1, schema.node_dim()) =
          g.nodes.row(g.edge_src[k]);
      batch.edge_inputs.block(edge_base + k, schema.node_dim(), 1, schema.edge_dim()) =
          g.edge_feats.row(k);
      batch.edge_src.push_back(node_base + g.edge_src[k]);
      batch.edge_dst.push_back(node_base + g.edge_dst[k]);
      batch.reverse_edge.push_back(edge_base + g.reverse_edge[k]);
    }
    node_base += n;
    edge_base += e;
  }
  return batch;
}

}  // namespace synthweaver
