// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "hosgns/alias.hpp"
#include "hosgns/common.hpp"
#include "hosgns/supra_adjacency.hpp"
#include "hosgns/temporal_graph.hpp"

namespace hosgns {

/// Sparse order-N probability tensor P_D with cached mode marginals.
///
/// Entries are stored in lexicographic index order, strictly positive and
/// summing to one. Immutable after construction.
class CooccurrenceTensor {
 public:
  CooccurrenceTensor() = default;

  /// Builds a tensor from (index tuple, weight) pairs: duplicates are summed,
  /// zero weights dropped, and the result normalized to sum one.
  /// `indices` holds weights.size() * mode_sizes.size() values, row-major.
  static CooccurrenceTensor from_weights(std::vector<int> mode_sizes, std::vector<Role> roles,
                                         std::vector<std::int32_t> indices,
                                         std::vector<double> weights);

  int order() const noexcept { return static_cast<int>(mode_sizes_.size()); }
  const std::vector<int>& mode_sizes() const noexcept { return mode_sizes_; }
  const std::vector<Role>& roles() const noexcept { return roles_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::int32_t> index(std::size_t entry) const {
    return {indices_.data() + entry * mode_sizes_.size(), mode_sizes_.size()};
  }
  double value(std::size_t entry) const { return values_[entry]; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<std::int32_t>& indices() const noexcept { return indices_; }

  /// P_D at an arbitrary index tuple (0 when not stored).
  double at(std::span<const int> idx) const;
  /// Marginal distribution of mode n.
  const Eigen::VectorXd& marginal(int n) const { return marginals_.at(static_cast<std::size_t>(n)); }
  /// P_N(idx): product of the mode marginals.
  double noise(std::span<const int> idx) const;
  double sum() const;

 private:
  std::vector<int> mode_sizes_;
  std::vector<Role> roles_;
  std::vector<std::int32_t> indices_;
  std::vector<double> values_;
  std::vector<Eigen::VectorXd> marginals_;
};

/// Order-3 (node, context, time) tensor: omega(i,j,k) / vol(H) for both
/// orientations of each event.
CooccurrenceTensor stat_tensor(const TimeVaryingGraph& g);

/// Largest number of stored entries dyn_tensor() accepts by default.
inline constexpr std::size_t kDefaultDynEntryBudget = 80'000'000;

/// Order-4 (node, context, time, context-time) tensor: the symmetrized
/// window-T random-walk co-occurrence on the supra graph, computed exactly
/// with T sparse propagation steps per source supra-node.
/// Throws ResourceError when the support would exceed `max_entries`.
CooccurrenceTensor dyn_tensor(const SupraGraph& s, int window,
                              std::size_t max_entries = kDefaultDynEntryBudget);

/// Monte Carlo estimate of dyn_tensor from sampled walks. Each walk is
/// anchored at its start a and contributes p*(a) / walks_per_node to the
/// (a, walk[r]) pair for r = 1..window; the counts are then symmetrized and
/// normalized.
CooccurrenceTensor dyn_tensor_sampled(const SupraGraph& s, const WalkConfig& cfg);

/// 1/2 [ stat(i,j,k) delta_kl + dyn(i,j,k,l) ].
CooccurrenceTensor statdyn_tensor(const CooccurrenceTensor& stat, const CooccurrenceTensor& dyn);

struct SpmiQuery {
  double kappa = 1.0;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(P_D / P_N) - log(kappa); kNegInf when P_D(idx) = 0.
/// Throws DomainError for an index with a zero marginal.
double spmi(const CooccurrenceTensor& t, std::span<const int> idx, SpmiQuery q);

/// Expected DeepWalk PMI of (i, j) for window T on a static weighted graph.
double deepwalk_expected_pmi(const SparseMatrix& adjacency, int i, int j, int window);

/// Alias tables shared by the positive and negative samplers.
struct TensorSamplingTables {
  explicit TensorSamplingTables(const CooccurrenceTensor& t);
  const CooccurrenceTensor* tensor;
  AliasTable entries;
  std::vector<AliasTable> modes;
};

/// Stream of index tuples drawn from P_D.
class PositiveSampler {
 public:
  PositiveSampler(const TensorSamplingTables& tables, std::uint64_t seed)
      : tables_(&tables), rng_(seed) {}
  void next(std::span<int> out);

 private:
  const TensorSamplingTables* tables_;
  std::mt19937_64 rng_;
};

/// Stream of index tuples drawn from the product of marginals P_N.
class NegativeSampler {
 public:
  NegativeSampler(const TensorSamplingTables& tables, std::uint64_t seed)
      : tables_(&tables), rng_(seed) {}
  void next(std::span<int> out);
  int draw_mode(int n) { return static_cast<int>(tables_->modes[static_cast<std::size_t>(n)](rng_)); }

 private:
  const TensorSamplingTables* tables_;
  std::mt19937_64 rng_;
};

/// COO text export: `idx_0 ... idx_{N-1} value` per line.
void write_tensor_coo(std::ostream& out, const CooccurrenceTensor& t);
nlohmann::json tensor_sidecar_json(const CooccurrenceTensor& t);

}  // namespace hosgns
