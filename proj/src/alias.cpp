// SPDX-License-Identifier: Apache-2.0
#include "hosgns/alias.hpp"

#include <cmath>
#include <limits>

#include "hosgns/common.hpp"

namespace hosgns {

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0 || n > std::numeric_limits<std::uint32_t>::max())
    throw DomainError("alias table needs 1..2^32-1 categories");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("alias weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("alias weights sum to zero");

  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t k = 0; k < n; ++k) {
    scaled[k] = weights[k] * static_cast<double>(n) / total;
    (scaled[k] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(k));
  }
  std::vector<double> accept(n, 1.0);
  alias_.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) alias_[k] = static_cast<std::uint32_t>(k);
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    accept[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // leftovers are 1 up to rounding
  prob_.resize(n);
  constexpr double scale = 4294967296.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = std::ceil(accept[k] * scale);
    prob_[k] = t >= scale ? std::numeric_limits<std::uint32_t>::max() : static_cast<std::uint32_t>(t);
    if (accept[k] >= 1.0) alias_[k] = static_cast<std::uint32_t>(k);
  }
}

}  // namespace hosgns
