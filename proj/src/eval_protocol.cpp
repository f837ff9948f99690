// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "hosgns/alias.hpp"
#include "hosgns/common.hpp"
#include "hosgns/eval.hpp"

namespace hosgns {

namespace {

std::vector<bool> split_members(int n, double fraction, std::mt19937_64& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::lround(fraction * n));
  std::vector<bool> train(static_cast<std::size_t>(n), false);
  for (std::size_t r = 0; r < n_train; ++r) train[static_cast<std::size_t>(order[r])] = true;
  return train;
}

}  // namespace

SplitSpec make_split(const TimeVaryingGraph& g, double fraction, std::uint64_t seed) {
  if (g.num_nodes() < 2 || g.num_times() < 2)
    throw DomainError("splitting needs at least two nodes and two time slices");
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw DomainError("split fraction must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  SplitSpec s;
  s.fraction = fraction;
  s.seed = seed;
  s.node_train = split_members(g.num_nodes(), fraction, rng);
  s.time_train = split_members(g.num_times(), fraction, rng);
  if (classification_instances(g, s, true).empty() || classification_instances(g, s, false).empty())
    throw DegenerateError("split with seed " + std::to_string(seed) + " has an empty instance set");
  return s;
}

SplitList make_splits(const TimeVaryingGraph& g, int count, double fraction,
                      std::uint64_t master_seed) {
  SplitList out;
  std::uint64_t attempt = 0;
  while (static_cast<int>(out.splits.size()) < count) {
    const std::uint64_t seed = derive_seed(master_seed, "split", attempt++);
    try {
      out.splits.push_back(make_split(g, fraction, seed));
    } catch (const DegenerateError&) {
      if (++out.resamples > 100 * std::max(count, 1)) throw;
    }
  }
  return out;
}

std::vector<std::pair<int, int>> classification_instances(const TimeVaryingGraph& g,
                                                          const SplitSpec& split, bool train) {
  std::vector<std::pair<int, int>> out;
  for (const auto& [i, k] : g.active_pairs())
    if (split.node_train[i] == train && split.time_train[k] == train) out.emplace_back(i, k);
  return out;
}

std::vector<LabeledEvent> reconstruction_instances(const TimeVaryingGraph& g,
                                                   std::span<const EventKey> non_events,
                                                   const SplitSpec& split, bool train) {
  auto inside = [&](int i, int j, int k) {
    return split.node_train[i] == train && split.node_train[j] == train && split.time_train[k] == train;
  };
  std::vector<LabeledEvent> out;
  for (const Event& e : g.events())
    if (inside(e.i, e.j, e.k)) out.push_back({{e.i, e.j, e.k}, 1});
  for (const EventKey& e : non_events)
    if (inside(e.i, e.j, e.k)) out.push_back({e, 0});
  return out;
}

std::vector<EventKey> negative_events(const TimeVaryingGraph& g, std::uint64_t seed) {
  const std::size_t need = g.num_events();
  std::vector<double> pairs(static_cast<std::size_t>(g.num_times()));
  double candidates = 0.0;
  for (int k = 0; k < g.num_times(); ++k) {
    const double a = static_cast<double>(g.active_nodes(k).size());
    pairs[static_cast<std::size_t>(k)] = a * (a - 1.0) / 2.0;
    candidates += pairs[static_cast<std::size_t>(k)] - static_cast<double>(g.events_at(k).size());
  }
  if (candidates < static_cast<double>(need))
    throw InfeasibleError("only " + std::to_string(static_cast<long long>(candidates)) +
                          " non-events exist, " + std::to_string(need) + " required (deficit " +
                          std::to_string(static_cast<long long>(need - candidates)) + ")");

  std::mt19937_64 rng(seed);
  std::set<EventKey> chosen;
  const AliasTable slices(pairs);
  const std::size_t cap = 20 * need + 1000;
  for (std::size_t attempt = 0; attempt < cap && chosen.size() < need; ++attempt) {
    const int k = static_cast<int>(slices(rng));
    const auto nodes = g.active_nodes(k);
    std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
    int a = nodes[pick(rng)], b = nodes[pick(rng)];
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (g.weight(a, b, k) != 0.0) continue;
    chosen.insert({a, b, k});
  }
  if (chosen.size() < need) {
    std::vector<EventKey> rest;
    for (int k = 0; k < g.num_times(); ++k) {
      const auto nodes = g.active_nodes(k);
      for (std::size_t x = 0; x < nodes.size(); ++x)
        for (std::size_t y = x + 1; y < nodes.size(); ++y) {
          const EventKey e{nodes[x], nodes[y], k};
          if (g.weight(e.i, e.j, k) == 0.0 && !chosen.contains(e)) rest.push_back(e);
        }
    }
    std::shuffle(rest.begin(), rest.end(), rng);
    for (std::size_t r = 0; chosen.size() < need; ++r) chosen.insert(rest[r]);
  }
  return {chosen.begin(), chosen.end()};
}

std::pair<double, double> mean_std(std::span<const double> xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json params = nlohmann::json::object();
  if (r.beta) params["beta"] = *r.beta;
  if (r.mu) params["mu"] = *r.mu;
  nlohmann::json j{
      {"task", r.task},
      {"dataset", r.dataset},
      {"model", r.model},
      {"operator", r.op},
      {"dim", r.dim},
      {"params", params},
      {"macro_f1_mean", r.macro_f1_mean},
      {"macro_f1_std", r.macro_f1_std},
      {"n_runs", r.n_runs},
      {"n_splits", r.n_splits},
      {"seeds", r.seeds},
      {"scores", r.scores},
  };
  for (const auto& [k, v] : r.extra.items()) j[k] = v;
  return j;
}

namespace {

double score_split(const Eigen::MatrixXd& Xtr, const std::vector<int>& ytr, const Eigen::MatrixXd& Xts,
                   const std::vector<int>& yts, const LogRegConfig& cfg) {
  const auto model = logreg_fit(Xtr, ytr, cfg);
  return macro_f1(yts, logreg_predict(model, Xts));
}

void finish(EvalReport& r) {
  std::vector<double> all;
  for (const auto& row : r.scores) all.insert(all.end(), row.begin(), row.end());
  std::tie(r.macro_f1_mean, r.macro_f1_std) = mean_std(all);
}

}  // namespace

EvalReport run_classification(const TimeVaryingGraph& g, std::span<const EmbeddingSet<double>> runs,
                              std::span<const SirTrajectory> sir_runs,
                              std::span<const SplitSpec> splits, Operator op,
                              const LogRegConfig& cfg) {
  if (runs.size() != sir_runs.size())
    throw DimensionError("one SIR realization per embedding run required");
  EvalReport r;
  r.task = "classify";
  r.op = std::string(operator_name(op));
  r.dim = runs.empty() ? 0 : runs.front().dim();
  r.n_runs = static_cast<int>(runs.size());
  r.n_splits = static_cast<int>(splits.size());
  for (std::size_t run = 0; run < runs.size(); ++run) {
    const auto& e = runs[run];
    const auto& sir = sir_runs[run];
    if (sir.num_nodes() != g.num_nodes() || sir.num_times() != g.num_times())
      throw DimensionError("SIR trajectory does not match the graph");
    const int width = feature_dim(op, e, Target::Classification);
    auto build = [&](const std::vector<std::pair<int, int>>& inst, Eigen::MatrixXd& X,
                     std::vector<int>& y) {
      X.resize(static_cast<Eigen::Index>(inst.size()), width);
      y.resize(inst.size());
      for (std::size_t n = 0; n < inst.size(); ++n) {
        const std::array<int, 2> idx{inst[n].first, inst[n].second};
        X.row(static_cast<Eigen::Index>(n)) = combine(op, e, Target::Classification, idx).transpose();
        y[n] = static_cast<int>(sir.state(idx[0], idx[1]));
      }
    };
    std::vector<double> row;
    for (const auto& split : splits) {
      Eigen::MatrixXd Xtr, Xts;
      std::vector<int> ytr, yts;
      build(classification_instances(g, split, true), Xtr, ytr);
      build(classification_instances(g, split, false), Xts, yts);
      row.push_back(score_split(Xtr, ytr, Xts, yts, cfg));
    }
    r.scores.push_back(std::move(row));
  }
  finish(r);
  return r;
}

EvalReport run_reconstruction(const TimeVaryingGraph& g, std::span<const EmbeddingSet<double>> runs,
                              std::span<const std::vector<EventKey>> non_events,
                              std::span<const SplitSpec> splits, Operator op,
                              const LogRegConfig& cfg) {
  if (runs.size() != non_events.size())
    throw DimensionError("one non-event set per embedding run required");
  EvalReport r;
  r.task = "reconstruct";
  r.op = std::string(operator_name(op));
  r.dim = runs.empty() ? 0 : runs.front().dim();
  r.n_runs = static_cast<int>(runs.size());
  r.n_splits = static_cast<int>(splits.size());
  for (std::size_t run = 0; run < runs.size(); ++run) {
    const auto& e = runs[run];
    const int width = feature_dim(op, e, Target::Reconstruction);
    auto build = [&](const std::vector<LabeledEvent>& inst, Eigen::MatrixXd& X, std::vector<int>& y) {
      X.resize(static_cast<Eigen::Index>(inst.size()), width);
      y.resize(inst.size());
      for (std::size_t n = 0; n < inst.size(); ++n) {
        const std::array<int, 3> idx{inst[n].key.i, inst[n].key.j, inst[n].key.k};
        X.row(static_cast<Eigen::Index>(n)) = combine(op, e, Target::Reconstruction, idx).transpose();
        y[n] = inst[n].label;
      }
    };
    std::vector<double> row;
    for (const auto& split : splits) {
      Eigen::MatrixXd Xtr, Xts;
      std::vector<int> ytr, yts;
      build(reconstruction_instances(g, non_events[run], split, true), Xtr, ytr);
      build(reconstruction_instances(g, non_events[run], split, false), Xts, yts);
      if (ytr.empty() || yts.empty()) throw DegenerateError("split leaves no reconstruction instances");
      row.push_back(score_split(Xtr, ytr, Xts, yts, cfg));
    }
    r.scores.push_back(std::move(row));
  }
  finish(r);
  return r;
}

}  // namespace hosgns
