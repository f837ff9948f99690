// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hosgns/common.hpp"

namespace hosgns {

template <typename Scalar>
using FactorMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Factor matrices A^(1..N) (W, C, T, S for the time-varying graph tensors),
/// each mode_size x dim with rows indexed by the mode vocabulary.
template <typename Scalar>
struct EmbeddingSet {
  std::vector<FactorMatrix<Scalar>> factors;
  std::vector<Role> roles;

  int order() const noexcept { return static_cast<int>(factors.size()); }
  int dim() const noexcept { return factors.empty() ? 0 : static_cast<int>(factors.front().cols()); }

  bool has(Role r) const noexcept {
    for (auto x : roles)
      if (x == r) return true;
    return false;
  }
  const FactorMatrix<Scalar>& factor(Role r) const {
    for (std::size_t n = 0; n < roles.size(); ++n)
      if (roles[n] == r) return factors[n];
    throw DomainError("embedding has no factor with role '" + std::string(role_name(r)) + "'");
  }

  static EmbeddingSet zeros(std::span<const int> mode_sizes, std::vector<Role> roles, int dim) {
    if (roles.size() != mode_sizes.size()) throw DimensionError("one role per mode required");
    EmbeddingSet e;
    e.roles = std::move(roles);
    for (int m : mode_sizes) e.factors.push_back(FactorMatrix<Scalar>::Zero(m, dim));
    return e;
  }

  /// Entries uniform in [-scale/dim, scale/dim].
  static EmbeddingSet uniform(std::span<const int> mode_sizes, std::vector<Role> roles, int dim,
                              double scale, std::uint64_t seed) {
    auto e = zeros(mode_sizes, std::move(roles), dim);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale / dim, scale / dim);
    for (auto& f : e.factors)
      for (Eigen::Index r = 0; r < f.rows(); ++r)
        for (Eigen::Index c = 0; c < f.cols(); ++c) f(r, c) = static_cast<Scalar>(u(rng));
    return e;
  }

  template <typename Other>
  EmbeddingSet<Other> cast() const {
    EmbeddingSet<Other> e;
    e.roles = roles;
    for (const auto& f : factors) e.factors.push_back(f.template cast<Other>());
    return e;
  }

  bool all_finite() const {
    for (const auto& f : factors)
      if (!f.allFinite()) return false;
    return true;
  }
};

/// Higher-order inner product sum_r prod_n v_n[r] of equally sized vectors.
template <typename First, typename... Rest>
typename First::Scalar ho_inner(const Eigen::MatrixBase<First>& first,
                                const Eigen::MatrixBase<Rest>&... rest) {
  if (((rest.size() != first.size()) || ...)) throw DimensionError("ho_inner: dimension mismatch");
  return (first.array() * ... * rest.array()).sum();
}

/// Runtime-order variant.
template <typename Scalar>
Scalar ho_inner(std::span<const RowVector<Scalar>> vectors) {
  if (vectors.empty()) throw DimensionError("ho_inner: no vectors");
  RowVector<Scalar> acc = vectors.front();
  for (std::size_t n = 1; n < vectors.size(); ++n) {
    if (vectors[n].size() != acc.size()) throw DimensionError("ho_inner: dimension mismatch");
    acc.array() *= vectors[n].array();
  }
  return acc.sum();
}

/// m = [[A1[idx0], ..., AN[idxN-1]]] for one index tuple.
template <typename Scalar, typename Index>
Scalar tuple_inner(const EmbeddingSet<Scalar>& e, const Index* idx) {
  const int order = e.order();
  switch (order) {
    case 2:
      return e.factors[0].row(idx[0]).dot(e.factors[1].row(idx[1]));
    case 3:
      return (e.factors[0].row(idx[0]).array() * e.factors[1].row(idx[1]).array() *
              e.factors[2].row(idx[2]).array()).sum();
    case 4:
      return (e.factors[0].row(idx[0]).array() * e.factors[1].row(idx[1]).array() *
              e.factors[2].row(idx[2]).array() * e.factors[3].row(idx[3]).array()).sum();
    default: {
      Eigen::Array<Scalar, 1, Eigen::Dynamic> acc = e.factors[0].row(idx[0]).array();
      for (int n = 1; n < order; ++n) acc *= e.factors[static_cast<std::size_t>(n)].row(idx[n]).array();
      return acc.sum();
    }
  }
}

/// Writes one factor as TSV: header `#<role> dim=d kappa=k seed=s`, then
/// `index<TAB>v_1 ... v_d` rows.
void write_factor_tsv(std::ostream& out, const FactorMatrix<double>& f, Role role, double kappa,
                      std::uint64_t seed);
void write_factor_tsv(std::ostream& out, const FactorMatrix<float>& f, Role role, double kappa,
                      std::uint64_t seed);

struct FactorFile {
  Role role = Role::Node;
  int dim = 0;
  double kappa = 0.0;
  std::uint64_t seed = 0;
  FactorMatrix<double> matrix;
};

FactorFile read_factor_tsv(std::istream& in);

}  // namespace hosgns
