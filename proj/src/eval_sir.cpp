// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "hosgns/common.hpp"
#include "hosgns/eval.hpp"

namespace hosgns {

void SirConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("mu must lie in [0, 1]");
}

int SirTrajectory::count(int time, SirState s) const {
  int n = 0;
  for (int v = 0; v < num_nodes_; ++v) n += state(v, time) == s;
  return n;
}

SirTrajectory sir_simulate(const TimeVaryingGraph& g, const SirConfig& cfg) {
  cfg.validate();
  if (g.empty()) throw EmptyGraphError("SIR on an empty graph");
  const int V = g.num_nodes();
  const int T = g.num_times();

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  int seed_node;
  if (cfg.initial_infected) {
    seed_node = *cfg.initial_infected;
    if (seed_node < 0 || seed_node >= V) throw DomainError("initial_infected out of range");
    if (g.active_times(seed_node).empty()) throw DomainError("initial_infected node is never active");
  } else {
    std::vector<int> candidates;
    for (int v = 0; v < V; ++v)
      if (!g.active_times(v).empty()) candidates.push_back(v);
    seed_node = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
  }
  const int seed_time = g.active_times(seed_node).front();

  SirTrajectory traj(V, T);
  traj.seed_node_ = seed_node;
  std::vector<SirState> cur(static_cast<std::size_t>(V), SirState::S);
  std::vector<SirState> start;
  for (int k = 0; k < T; ++k) {
    if (k == seed_time && cur[seed_node] == SirState::S) cur[seed_node] = SirState::I;
    start = cur;
    for (const Event& ev : g.events_at(k)) {
      const SirState a = start[ev.i], b = start[ev.j];
      int target = -1;
      if (a == SirState::I && b == SirState::S) target = ev.j;
      else if (b == SirState::I && a == SirState::S) target = ev.i;
      if (target < 0) continue;
      const double p = 1.0 - std::pow(1.0 - cfg.beta, ev.weight);
      if (unif(rng) < p) cur[target] = SirState::I;
    }
    for (int v = 0; v < V; ++v) traj.at(v, k) = cur[v];
    for (int v = 0; v < V; ++v)
      if (cur[v] == SirState::I && unif(rng) < cfg.mu) cur[v] = SirState::R;
  }
  return traj;
}

ConditionedSir sir_simulate_conditioned(const TimeVaryingGraph& g, const SirConfig& cfg,
                                        int max_attempts) {
  ConditionedSir out;
  SirConfig c = cfg;
  for (int a = 0; a < max_attempts; ++a) {
    c.seed = a == 0 ? cfg.seed : derive_seed(cfg.seed, "sir-retry", static_cast<std::uint64_t>(a));
    out.trajectory = sir_simulate(g, c);
    out.attempts = a + 1;
    if (out.trajectory.count(g.num_times() / 2, SirState::I) >= 1) return out;
  }
  throw DegenerateError("no SIR realization with infected nodes at half time after " +
                        std::to_string(max_attempts) + " attempts");
}

}  // namespace hosgns
