// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <nlohmann/json.hpp>

#include "hosgns/temporal_graph.hpp"

namespace hosgns {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Time-stamped node i^(k) of the supra-adjacency graph.
struct SupraNode {
  int node = 0;
  int time = 0;
  int flat = 0;
};

/// Static weighted graph over the active (node, time) pairs of a
/// time-varying graph. Flat indices follow (node, time) lexicographic order.
class SupraGraph {
 public:
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<SupraNode>& nodes() const noexcept { return nodes_; }
  /// Symmetric adjacency over flat indices.
  const SparseMatrix& adjacency() const noexcept { return adjacency_; }
  const Eigen::VectorXd& degrees() const noexcept { return degrees_; }
  double volume() const noexcept { return volume_; }
  int num_graph_nodes() const noexcept { return num_nodes_; }
  int num_graph_times() const noexcept { return num_times_; }

  /// Flat index of (node, time), or -1 when the pair is not active.
  int flat(int node, int time) const;
  const SupraNode& unflat(int flat) const { return nodes_.at(static_cast<std::size_t>(flat)); }

 private:
  friend SupraGraph build_supra(const TimeVaryingGraph&);
  friend SupraGraph supra_from_adjacency(int, int, std::vector<SupraNode>, SparseMatrix);
  void finish();

  int num_nodes_ = 0;
  int num_times_ = 0;
  std::vector<SupraNode> nodes_;
  std::vector<int> lookup_;
  SparseMatrix adjacency_;
  Eigen::VectorXd degrees_;
  double volume_ = 0.0;
};

/// Cross-coupling edges carry the event weight (accumulated), self-coupling
/// edges between successive activations of a node have weight 1.
SupraGraph build_supra(const TimeVaryingGraph& g);

/// Wraps an explicit adjacency (tests and small fixtures).
SupraGraph supra_from_adjacency(int num_nodes, int num_times, std::vector<SupraNode> nodes,
                                SparseMatrix adjacency);

struct TransitionMatrix {
  SparseMatrix matrix;          ///< row-stochastic on non-absorbing rows
  std::vector<bool> absorbing;  ///< rows with zero degree
};

TransitionMatrix transition_matrix(const SupraGraph& s);

struct StationaryDistribution {
  Eigen::VectorXd p;
  int num_components = 0;
  bool connected() const noexcept { return num_components <= 1; }
};

/// p*(ik) = d_(ik) / vol(G_H); components are counted and flagged.
StationaryDistribution stationary_distribution(const SupraGraph& s);

/// Connected component label of every flat index.
std::vector<int> connected_components(const SparseMatrix& adjacency);

struct WalkConfig {
  int window = 10;
  int walks_per_node = 10;
  /// Number of steps per walk; a walk holds up to walk_length + 1 nodes.
  int walk_length = 80;
  std::uint64_t seed = 1;

  void validate() const;
};

using Walk = std::vector<int>;

/// Walks in (repetition, start) order. Each walk uses its own RNG stream
/// derived from (seed, start, repetition); absorbing nodes end a walk.
std::vector<Walk> sample_walks(const SupraGraph& s, const WalkConfig& cfg);

/// `flat_a flat_b weight` lines, one per undirected edge (flat_a < flat_b).
void write_supra_edges(std::ostream& out, const SupraGraph& s);
nlohmann::json supra_index_json(const SupraGraph& s);

}  // namespace hosgns
