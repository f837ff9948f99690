// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hosgns {

/// Walker/Vose alias table: O(1) draws from a fixed categorical distribution.
class AliasTable {
 public:
  AliasTable() = default;
  /// Weights need not be normalized; at least one must be positive.
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const noexcept { return prob_.size(); }

  /// Maps one 64-bit random word to a category: the high 32 bits pick the
  /// column, the low 32 bits the coin.
  std::uint32_t draw(std::uint64_t bits) const noexcept {
    const auto col = static_cast<std::uint32_t>(((bits >> 32) * prob_.size()) >> 32);
    const auto coin = static_cast<std::uint32_t>(bits);
    return coin < prob_[col] ? col : alias_[col];
  }

  template <typename Rng>
  std::uint32_t operator()(Rng& rng) const {
    return draw(static_cast<std::uint64_t>(rng()));
  }

 private:
  std::vector<std::uint32_t> prob_;  // acceptance threshold scaled to 2^32
  std::vector<std::uint32_t> alias_;
};

}  // namespace hosgns
