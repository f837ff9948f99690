// SPDX-License-Identifier: Apache-2.0
#include "hosgns/cooccurrence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace hosgns {

namespace {

// Mixed-radix key of an index tuple; lexicographic order of tuples equals
// numeric order of keys.
std::uint64_t encode(std::span<const int> sizes, const std::int32_t* idx) {
  std::uint64_t key = 0;
  for (std::size_t n = 0; n < sizes.size(); ++n)
    key = key * static_cast<std::uint64_t>(sizes[n]) + static_cast<std::uint64_t>(idx[n]);
  return key;
}

}  // namespace

CooccurrenceTensor CooccurrenceTensor::from_weights(std::vector<int> mode_sizes,
                                                    std::vector<Role> roles,
                                                    std::vector<std::int32_t> indices,
                                                    std::vector<double> weights) {
  const std::size_t order = mode_sizes.size();
  if (order < 2) throw DimensionError("tensor order must be >= 2");
  if (roles.size() != order) throw DimensionError("one role per mode required");
  if (indices.size() != weights.size() * order) throw DimensionError("index/weight count mismatch");
  long double grid = 1.0L;
  for (int m : mode_sizes) {
    if (m <= 0) throw DimensionError("mode sizes must be positive");
    grid *= static_cast<long double>(m);
  }
  if (grid >= 9.2e18L) throw DimensionError("index grid too large");

  std::vector<std::pair<std::uint64_t, double>> keyed;
  keyed.reserve(weights.size());
  double total = 0.0;
  for (std::size_t e = 0; e < weights.size(); ++e) {
    const double w = weights[e];
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("tensor weights must be finite and >= 0");
    if (w == 0.0) continue;
    const std::int32_t* idx = indices.data() + e * order;
    for (std::size_t n = 0; n < order; ++n)
      if (idx[n] < 0 || idx[n] >= mode_sizes[n]) throw DimensionError("tensor index out of range");
    keyed.emplace_back(encode(mode_sizes, idx), w);
  }
  if (keyed.empty()) throw DomainError("tensor has no positive entries");
  indices.clear();
  indices.shrink_to_fit();
  weights.clear();
  weights.shrink_to_fit();
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  CooccurrenceTensor t;
  t.mode_sizes_ = std::move(mode_sizes);
  t.roles_ = std::move(roles);
  std::vector<std::uint64_t> keys;
  keys.reserve(keyed.size());
  t.values_.reserve(keyed.size());
  for (const auto& [k, w] : keyed) {
    if (!keys.empty() && keys.back() == k) {
      t.values_.back() += w;
    } else {
      keys.push_back(k);
      t.values_.push_back(w);
    }
  }
  keyed.clear();
  keyed.shrink_to_fit();
  for (double w : t.values_) total += w;
  for (double& w : t.values_) w /= total;

  t.indices_.resize(keys.size() * order);
  for (std::size_t e = 0; e < keys.size(); ++e) {
    std::uint64_t k = keys[e];
    for (std::size_t n = order; n-- > 0;) {
      const auto m = static_cast<std::uint64_t>(t.mode_sizes_[n]);
      t.indices_[e * order + n] = static_cast<std::int32_t>(k % m);
      k /= m;
    }
  }
  t.marginals_.resize(order);
  for (std::size_t n = 0; n < order; ++n) t.marginals_[n] = Eigen::VectorXd::Zero(t.mode_sizes_[n]);
  for (std::size_t e = 0; e < t.values_.size(); ++e)
    for (std::size_t n = 0; n < order; ++n) t.marginals_[n][t.indices_[e * order + n]] += t.values_[e];
  return t;
}

double CooccurrenceTensor::at(std::span<const int> idx) const {
  const std::size_t order = mode_sizes_.size();
  if (idx.size() != order) throw DimensionError("index tuple has wrong order");
  for (std::size_t n = 0; n < order; ++n)
    if (idx[n] < 0 || idx[n] >= mode_sizes_[n]) throw DimensionError("index out of range");
  std::size_t lo = 0, hi = values_.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::int32_t* e = indices_.data() + mid * order;
    int cmp = 0;
    for (std::size_t n = 0; n < order && cmp == 0; ++n)
      cmp = e[n] < idx[n] ? -1 : (e[n] > idx[n] ? 1 : 0);
    if (cmp == 0) return values_[mid];
    if (cmp < 0) lo = mid + 1;
    else hi = mid;
  }
  return 0.0;
}

double CooccurrenceTensor::noise(std::span<const int> idx) const {
  double p = 1.0;
  for (std::size_t n = 0; n < idx.size(); ++n) p *= marginals_[n][idx[n]];
  return p;
}

double CooccurrenceTensor::sum() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

CooccurrenceTensor stat_tensor(const TimeVaryingGraph& g) {
  if (g.empty()) throw EmptyGraphError("stat tensor of empty graph");
  const double vol = graph_volume(g);
  std::vector<std::int32_t> idx;
  std::vector<double> w;
  idx.reserve(6 * g.num_events());
  w.reserve(2 * g.num_events());
  for (const auto& e : g.events()) {
    idx.insert(idx.end(), {e.i, e.j, e.k});
    w.push_back(e.weight / vol);
    idx.insert(idx.end(), {e.j, e.i, e.k});
    w.push_back(e.weight / vol);
  }
  return CooccurrenceTensor::from_weights({g.num_nodes(), g.num_nodes(), g.num_times()},
                                          {Role::Node, Role::Context, Role::Time},
                                          std::move(idx), std::move(w));
}

namespace {

// Builds the order-4 tensor from a symmetric-pair accumulator S over flat
// supra indices: entry(a, b) = (S[a][b] + S[b][a]) / (2 * norm).
CooccurrenceTensor symmetrized_pairs(const SupraGraph& s, const SparseMatrix& acc, double norm) {
  const std::size_t nnz = static_cast<std::size_t>(acc.nonZeros());
  std::vector<std::int32_t> idx;
  std::vector<double> w;
  idx.reserve(4 * nnz);
  w.reserve(nnz);
  auto lookup = [&](int row, int col) {
    const auto* begin = acc.innerIndexPtr() + acc.outerIndexPtr()[row];
    const auto* end = acc.innerIndexPtr() + acc.outerIndexPtr()[row + 1];
    const auto* it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) return 0.0;
    return acc.valuePtr()[it - acc.innerIndexPtr()];
  };
  for (int a = 0; a < acc.outerSize(); ++a) {
    const auto& na = s.unflat(a);
    for (SparseMatrix::InnerIterator it(acc, a); it; ++it) {
      const int b = static_cast<int>(it.col());
      const auto& nb = s.unflat(b);
      const double v = (it.value() + lookup(b, a)) / (2.0 * norm);
      if (v <= 0.0) continue;
      idx.insert(idx.end(), {na.node, nb.node, na.time, nb.time});
      w.push_back(v);
    }
  }
  // pairs with S[a][b] == 0 but S[b][a] > 0
  for (int b = 0; b < acc.outerSize(); ++b) {
    for (SparseMatrix::InnerIterator it(acc, b); it; ++it) {
      const int a = static_cast<int>(it.col());
      if (lookup(a, b) != 0.0) continue;
      const auto& na = s.unflat(a);
      const auto& nb = s.unflat(b);
      idx.insert(idx.end(), {na.node, nb.node, na.time, nb.time});
      w.push_back(it.value() / (2.0 * norm));
    }
  }
  const int nv = s.num_graph_nodes();
  const int nt = s.num_graph_times();
  return CooccurrenceTensor::from_weights({nv, nv, nt, nt},
                                          {Role::Node, Role::Context, Role::Time, Role::ContextTime},
                                          std::move(idx), std::move(w));
}

}  // namespace

CooccurrenceTensor dyn_tensor(const SupraGraph& s, int window, std::size_t max_entries) {
  if (window < 1) throw DomainError("window must be >= 1");
  if (s.volume() <= 0.0) throw DomainError("supra graph has no edges");
  const auto trans = transition_matrix(s);
  const auto& P = trans.matrix;
  const auto p = stationary_distribution(s).p;
  const int n = static_cast<int>(s.size());

  // Row a of S = sum_r p*(a) (P^r)[a, :], propagated as a dense row vector.
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd cur(n), next(n), acc(n);
  std::vector<int> touched;
  std::vector<char> mark(static_cast<std::size_t>(n), 0);
  for (int a = 0; a < n; ++a) {
    if (p[a] <= 0.0) continue;
    cur.setZero();
    acc.setZero();
    cur[a] = p[a];
    std::vector<int> support{a};
    for (int r = 1; r <= window; ++r) {
      next.setZero();
      std::vector<int> next_support;
      for (int u : support) {
        const double mass = cur[u];
        if (mass == 0.0) continue;
        for (SparseMatrix::InnerIterator it(P, u); it; ++it) {
          const int v = static_cast<int>(it.col());
          if (next[v] == 0.0) next_support.push_back(v);
          next[v] += mass * it.value();
        }
      }
      std::sort(next_support.begin(), next_support.end());
      next_support.erase(std::unique(next_support.begin(), next_support.end()), next_support.end());
      for (int v : next_support) {
        acc[v] += next[v];
        if (!mark[static_cast<std::size_t>(v)]) {
          mark[static_cast<std::size_t>(v)] = 1;
          touched.push_back(v);
        }
      }
      std::swap(cur, next);
      support.swap(next_support);
    }
    std::sort(touched.begin(), touched.end());
    for (int v : touched) {
      if (acc[v] > 0.0) triplets.emplace_back(a, v, acc[v]);
      mark[static_cast<std::size_t>(v)] = 0;
    }
    touched.clear();
    if (triplets.size() > max_entries)
      throw ResourceError("dyn tensor support exceeds " + std::to_string(max_entries) +
                          " entries; use the sampled estimator (dyn_tensor_sampled)");
  }
  SparseMatrix S(n, n);
  S.setFromTriplets(triplets.begin(), triplets.end());
  triplets.clear();
  triplets.shrink_to_fit();
  return symmetrized_pairs(s, S, static_cast<double>(window));
}

CooccurrenceTensor dyn_tensor_sampled(const SupraGraph& s, const WalkConfig& cfg) {
  cfg.validate();
  const auto walks = sample_walks(s, cfg);
  const auto p = stationary_distribution(s).p;
  std::vector<Eigen::Triplet<double>> triplets;
  const double per_walk = 1.0 / cfg.walks_per_node;
  for (const auto& w : walks) {
    const int a = w.front();
    const int reach = std::min<int>(cfg.window, static_cast<int>(w.size()) - 1);
    for (int r = 1; r <= reach; ++r) triplets.emplace_back(a, w[static_cast<std::size_t>(r)], p[a] * per_walk);
  }
  const auto n = static_cast<Eigen::Index>(s.size());
  SparseMatrix S(n, n);
  S.setFromTriplets(triplets.begin(), triplets.end());
  return symmetrized_pairs(s, S, static_cast<double>(cfg.window));
}

CooccurrenceTensor statdyn_tensor(const CooccurrenceTensor& stat, const CooccurrenceTensor& dyn) {
  if (stat.order() != 3 || dyn.order() != 4) throw DimensionError("statdyn needs order-3 stat and order-4 dyn");
  const auto& a = stat.mode_sizes();
  const auto& b = dyn.mode_sizes();
  if (a[0] != b[0] || a[1] != b[1] || a[2] != b[2] || b[2] != b[3])
    throw DimensionError("stat/dyn mode sizes are incompatible");
  std::vector<std::int32_t> idx;
  std::vector<double> w;
  idx.reserve(4 * (stat.nnz() + dyn.nnz()));
  w.reserve(stat.nnz() + dyn.nnz());
  for (std::size_t e = 0; e < stat.nnz(); ++e) {
    auto i = stat.index(e);
    idx.insert(idx.end(), {i[0], i[1], i[2], i[2]});
    w.push_back(0.5 * stat.value(e));
  }
  for (std::size_t e = 0; e < dyn.nnz(); ++e) {
    auto i = dyn.index(e);
    idx.insert(idx.end(), i.begin(), i.end());
    w.push_back(0.5 * dyn.value(e));
  }
  return CooccurrenceTensor::from_weights(b, dyn.roles(), std::move(idx), std::move(w));
}

double spmi(const CooccurrenceTensor& t, std::span<const int> idx, SpmiQuery q) {
  if (!(q.kappa > 0.0)) throw DomainError("kappa must be positive");
  const double pd = t.at(idx);
  const double pn = t.noise(idx);
  if (pn <= 0.0) throw DomainError("index has a zero marginal");
  if (pd <= 0.0) return kNegInf;
  return std::log(pd / pn) - std::log(q.kappa);
}

double deepwalk_expected_pmi(const SparseMatrix& adjacency, int i, int j, int window) {
  const Eigen::Index n = adjacency.rows();
  if (i < 0 || j < 0 || i >= n || j >= n) throw DimensionError("node index out of range");
  if (window < 1) throw DomainError("window must be >= 1");
  Eigen::VectorXd deg = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < adjacency.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(adjacency, r); it; ++it) deg[r] += it.value();
  if (deg[i] <= 0.0 || deg[j] <= 0.0) throw DomainError("node with zero degree");
  const double vol = deg.sum();
  const double pi = deg[i] / vol;
  const double pj = deg[j] / vol;
  // row vectors e_i P^r and e_j P^r
  Eigen::RowVectorXd xi = Eigen::RowVectorXd::Unit(n, i);
  Eigen::RowVectorXd xj = Eigen::RowVectorXd::Unit(n, j);
  Eigen::VectorXd inv_deg = deg.cwiseInverse();
  for (Eigen::Index v = 0; v < n; ++v)
    if (deg[v] <= 0.0) inv_deg[v] = 0.0;
  double numer = 0.0;
  for (int r = 1; r <= window; ++r) {
    xi = (xi.cwiseProduct(inv_deg.transpose()) * adjacency).eval();
    xj = (xj.cwiseProduct(inv_deg.transpose()) * adjacency).eval();
    numer += pi * xi[j] + pj * xj[i];
  }
  numer /= 2.0 * window;
  if (numer <= 0.0) return kNegInf;
  return std::log(numer / (pi * pj));
}

TensorSamplingTables::TensorSamplingTables(const CooccurrenceTensor& t)
    : tensor(&t), entries(t.values()) {
  modes.reserve(static_cast<std::size_t>(t.order()));
  for (int n = 0; n < t.order(); ++n) {
    const auto& m = t.marginal(n);
    modes.emplace_back(std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));
  }
}

void PositiveSampler::next(std::span<int> out) {
  const auto e = tables_->entries(rng_);
  auto idx = tables_->tensor->index(e);
  std::copy(idx.begin(), idx.end(), out.begin());
}

void NegativeSampler::next(std::span<int> out) {
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = static_cast<int>(tables_->modes[n](rng_));
}

void write_tensor_coo(std::ostream& out, const CooccurrenceTensor& t) {
  char buf[64];
  for (std::size_t e = 0; e < t.nnz(); ++e) {
    for (auto v : t.index(e)) out << v << ' ';
    std::snprintf(buf, sizeof buf, "%.17g\n", t.value(e));
    out << buf;
  }
}

nlohmann::json tensor_sidecar_json(const CooccurrenceTensor& t) {
  std::vector<std::string> roles;
  for (auto r : t.roles()) roles.emplace_back(role_name(r));
  return {{"order", t.order()}, {"mode_sizes", t.mode_sizes()}, {"roles", roles}, {"nnz", t.nnz()}};
}

}  // namespace hosgns
