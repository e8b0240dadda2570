//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "synthweaver/molecule.hpp"

namespace synthweaver {

// Fixed featurization layout. The hash changes whenever the layout changes,
// invalidating stored checkpoints.
struct FeatureSchema {
  // element one-hot (10) + degree one-hot 0-4 (5) + charge (1) +
  // aromatic flag (1) + hydrogen-count one-hot 0-4 (5)
  static constexpr int kNodeDim = kElementCount + 5 + 1 + 1 + 5;
  // bond-order one-hot (4) + in-ring flag (1)
  static constexpr int kEdgeDim = 5;

  std::string version = "v1";
  int node_dim() const { return kNodeDim; }
  int edge_dim() const { return kEdgeDim; }
  std::uint64_t hash() const;
};

// Directed-edge graph features for one molecule. Every bond appears as two
// directed edges; reverse_edge maps each edge to its opposite direction.
struct GraphFeatures {
  Eigen::MatrixXd nodes;       // n x node_dim
  Eigen::MatrixXd edge_feats;  // 2m x edge_dim
  std::vector<int> edge_src;
  std::vector<int> edge_dst;
  std::vector<int> reverse_edge;
};

GraphFeatures featurize(const Molecule& mol, const FeatureSchema& schema);

// Several molecules packed into one disjoint graph; node and edge ids are
// global, node_graph maps nodes back to their molecule.
struct BatchGraph {
  Eigen::MatrixXd nodes;        // N x node_dim
  Eigen::MatrixXd edge_inputs;  // E x (node_dim + edge_dim), [x_src | e_uv]
  std::vector<int> edge_src;    // E
  std::vector<int> edge_dst;    // E
  std::vector<int> reverse_edge;
  std::vector<int> node_graph;  // N
  int num_graphs = 0;
  int node_dim = 0;
};

BatchGraph batch_featurize(std::span<const Molecule> mols, const FeatureSchema& schema);

}  // namespace synthweaver
