// SPDX-License-Identifier: Apache-2.0
#include "hosgns/supra_adjacency.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <set>

#include "hosgns/common.hpp"

namespace hosgns {

int SupraGraph::flat(int node, int time) const {
  if (node < 0 || node >= num_nodes_ || time < 0 || time >= num_times_) return -1;
  return lookup_[static_cast<std::size_t>(node) * static_cast<std::size_t>(num_times_) +
                 static_cast<std::size_t>(time)];
}

void SupraGraph::finish() {
  lookup_.assign(static_cast<std::size_t>(num_nodes_) * static_cast<std::size_t>(num_times_), -1);
  for (const auto& n : nodes_)
    lookup_[static_cast<std::size_t>(n.node) * static_cast<std::size_t>(num_times_) +
            static_cast<std::size_t>(n.time)] = n.flat;
  adjacency_.makeCompressed();
  degrees_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes_.size()));
  for (int r = 0; r < adjacency_.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(adjacency_, r); it; ++it) degrees_[r] += it.value();
  volume_ = degrees_.sum();
}

SupraGraph build_supra(const TimeVaryingGraph& g) {
  if (g.empty()) throw EmptyGraphError("supra graph of empty graph");
  SupraGraph s;
  s.num_nodes_ = g.num_nodes();
  s.num_times_ = g.num_times();
  const auto& active = g.active_pairs();
  s.nodes_.reserve(active.size());
  for (std::size_t n = 0; n < active.size(); ++n)
    s.nodes_.push_back({active[n].first, active[n].second, static_cast<int>(n)});
  s.lookup_.assign(static_cast<std::size_t>(s.num_nodes_) * static_cast<std::size_t>(s.num_times_), -1);
  for (const auto& n : s.nodes_)
    s.lookup_[static_cast<std::size_t>(n.node) * static_cast<std::size_t>(s.num_times_) +
              static_cast<std::size_t>(n.time)] = n.flat;

  std::map<std::pair<int, int>, double> cross;
  std::set<std::pair<int, int>> self;
  auto ordered = [](int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; };
  for (const auto& e : g.events()) {
    // rule 1 for both endpoints, rule 2 for the matching self-coupling
    for (auto [mover, partner] : {std::pair{e.i, e.j}, std::pair{e.j, e.i}}) {
      auto next = g.next_active(mover, e.k);
      if (!next) continue;
      const int from = s.flat(partner, e.k);
      const int to = s.flat(mover, *next);
      cross[ordered(from, to)] += e.weight;
      self.insert(ordered(s.flat(mover, e.k), to));
    }
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * (cross.size() + self.size()));
  for (const auto& [ab, w] : cross) {
    triplets.emplace_back(ab.first, ab.second, w);
    triplets.emplace_back(ab.second, ab.first, w);
  }
  for (const auto& ab : self) {
    triplets.emplace_back(ab.first, ab.second, 1.0);
    triplets.emplace_back(ab.second, ab.first, 1.0);
  }
  const auto n = static_cast<Eigen::Index>(s.nodes_.size());
  s.adjacency_.resize(n, n);
  s.adjacency_.setFromTriplets(triplets.begin(), triplets.end());
  s.finish();
  return s;
}

SupraGraph supra_from_adjacency(int num_nodes, int num_times, std::vector<SupraNode> nodes,
                                SparseMatrix adjacency) {
  if (adjacency.rows() != adjacency.cols() ||
      adjacency.rows() != static_cast<Eigen::Index>(nodes.size()))
    throw DimensionError("adjacency shape does not match node list");
  SupraGraph s;
  s.num_nodes_ = num_nodes;
  s.num_times_ = num_times;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (nodes[n].flat != static_cast<int>(n)) throw DomainError("flat indices must be 0..n-1");
    if (nodes[n].node < 0 || nodes[n].node >= num_nodes || nodes[n].time < 0 ||
        nodes[n].time >= num_times)
      throw DimensionError("supra node out of range");
  }
  s.nodes_ = std::move(nodes);
  s.adjacency_ = std::move(adjacency);
  s.finish();
  return s;
}

TransitionMatrix transition_matrix(const SupraGraph& s) {
  TransitionMatrix t;
  t.matrix = s.adjacency();
  t.absorbing.assign(s.size(), false);
  for (int r = 0; r < t.matrix.outerSize(); ++r) {
    const double d = s.degrees()[r];
    if (d <= 0.0) {
      t.absorbing[static_cast<std::size_t>(r)] = true;
      continue;
    }
    for (SparseMatrix::InnerIterator it(t.matrix, r); it; ++it) it.valueRef() /= d;
  }
  return t;
}

std::vector<int> connected_components(const SparseMatrix& adjacency) {
  const auto n = static_cast<std::size_t>(adjacency.rows());
  std::vector<int> label(n, -1);
  std::vector<int> stack;
  int next = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (label[start] >= 0) continue;
    label[start] = next;
    stack.push_back(static_cast<int>(start));
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (SparseMatrix::InnerIterator it(adjacency, v); it; ++it) {
        auto& l = label[static_cast<std::size_t>(it.col())];
        if (l < 0) {
          l = next;
          stack.push_back(static_cast<int>(it.col()));
        }
      }
    }
    ++next;
  }
  return label;
}

StationaryDistribution stationary_distribution(const SupraGraph& s) {
  StationaryDistribution d;
  if (s.volume() <= 0.0) throw DomainError("supra graph has no edges");
  d.p = s.degrees() / s.volume();
  auto labels = connected_components(s.adjacency());
  d.num_components = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  return d;
}

void WalkConfig::validate() const {
  if (window < 1) throw DomainError("window must be >= 1");
  if (walks_per_node < 1) throw DomainError("walks_per_node must be >= 1");
  if (walk_length < 1) throw DomainError("walk_length must be >= 1");
  if (window > walk_length) throw DomainError("window must not exceed walk_length");
}

std::vector<Walk> sample_walks(const SupraGraph& s, const WalkConfig& cfg) {
  cfg.validate();
  if (s.adjacency().nonZeros() == 0) throw DomainError("supra graph has no edges");
  const auto& adj = s.adjacency();
  // per-row cumulative weights for inverse-CDF steps
  std::vector<double> cumulative(static_cast<std::size_t>(adj.nonZeros()));
  for (int r = 0; r < adj.outerSize(); ++r) {
    double acc = 0.0;
    const auto begin = adj.outerIndexPtr()[r];
    const auto end = adj.outerIndexPtr()[r + 1];
    for (auto p = begin; p < end; ++p) {
      acc += adj.valuePtr()[p];
      cumulative[static_cast<std::size_t>(p)] = acc;
    }
  }
  std::vector<Walk> walks;
  walks.reserve(s.size() * static_cast<std::size_t>(cfg.walks_per_node));
  for (int rep = 0; rep < cfg.walks_per_node; ++rep) {
    for (int start = 0; start < static_cast<int>(s.size()); ++start) {
      if (s.degrees()[start] <= 0.0) continue;
      std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(start),
                                      static_cast<std::uint64_t>(rep)));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      Walk w;
      w.reserve(static_cast<std::size_t>(cfg.walk_length) + 1);
      w.push_back(start);
      int cur = start;
      for (int step = 0; step < cfg.walk_length; ++step) {
        const auto begin = adj.outerIndexPtr()[cur];
        const auto end = adj.outerIndexPtr()[cur + 1];
        if (begin == end) break;
        const double u = unit(rng) * cumulative[static_cast<std::size_t>(end - 1)];
        auto it = std::upper_bound(cumulative.begin() + begin, cumulative.begin() + end, u);
        if (it == cumulative.begin() + end) --it;
        cur = adj.innerIndexPtr()[it - cumulative.begin()];
        w.push_back(cur);
      }
      walks.push_back(std::move(w));
    }
  }
  return walks;
}

void write_supra_edges(std::ostream& out, const SupraGraph& s) {
  const auto& adj = s.adjacency();
  char buf[96];
  for (int r = 0; r < adj.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(adj, r); it; ++it) {
      if (it.col() <= r) continue;
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r, static_cast<int>(it.col()), it.value());
      out << buf;
    }
}

nlohmann::json supra_index_json(const SupraGraph& s) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : s.nodes()) nodes.push_back({n.flat, n.node, n.time});
  return {{"num_supra_nodes", s.size()},
          {"num_nodes", s.num_graph_nodes()},
          {"num_times", s.num_graph_times()},
          {"volume", s.volume()},
          {"nodes", std::move(nodes)}};
}

}  // namespace hosgns
