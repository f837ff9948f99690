// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "hosgns/embedding.hpp"
#include "hosgns/temporal_graph.hpp"

namespace hosgns {

// SIR ---------------------------------------------------------------------

enum class SirState : std::uint8_t { S = 0, I = 1, R = 2 };

struct SirConfig {
  double beta = 0.25;  ///< infection probability per unit of contact weight
  double mu = 0.002;   ///< recovery probability per slice
  std::uint64_t seed = 1;
  std::optional<int> initial_infected;  ///< uniformly random when unset

  void validate() const;
};

/// Node states at every slice (all nodes, not only active ones).
class SirTrajectory {
 public:
  SirTrajectory() = default;
  SirTrajectory(int num_nodes, int num_times)
      : num_nodes_(num_nodes), num_times_(num_times),
        states_(static_cast<std::size_t>(num_nodes) * static_cast<std::size_t>(num_times), SirState::S) {}

  int num_nodes() const noexcept { return num_nodes_; }
  int num_times() const noexcept { return num_times_; }
  int seed_node() const noexcept { return seed_node_; }
  SirState state(int node, int time) const {
    return states_[static_cast<std::size_t>(time) * static_cast<std::size_t>(num_nodes_) +
                   static_cast<std::size_t>(node)];
  }
  int count(int time, SirState s) const;

 private:
  friend SirTrajectory sir_simulate(const TimeVaryingGraph&, const SirConfig&);
  SirState& at(int node, int time) {
    return states_[static_cast<std::size_t>(time) * static_cast<std::size_t>(num_nodes_) +
                   static_cast<std::size_t>(node)];
  }

  int num_nodes_ = 0;
  int num_times_ = 0;
  int seed_node_ = -1;
  std::vector<SirState> states_;
};

/// Discrete-time SIR on the event sequence. Per slice k: the seed becomes
/// infected at its first active slice; each event between an I and an S node
/// (states at the start of the slice) infects with probability
/// 1 - (1 - beta)^weight; states are recorded; every I node then recovers
/// with probability mu.
SirTrajectory sir_simulate(const TimeVaryingGraph& g, const SirConfig& cfg);

struct ConditionedSir {
  SirTrajectory trajectory;
  int attempts = 0;
};

/// Resamples (with derived seeds) until at least one node is infected at
/// slice |T|/2. Throws DegenerateError after `max_attempts`.
ConditionedSir sir_simulate_conditioned(const TimeVaryingGraph& g, const SirConfig& cfg,
                                        int max_attempts = 1000);

// Feature operators -------------------------------------------------------

enum class Operator { Average, Hadamard, WeightedL1, WeightedL2, Concat };
enum class Target { Classification, Reconstruction };

std::string_view operator_name(Operator op);
/// Throws DomainError listing the valid names.
Operator operator_from_name(std::string_view name);

/// Feature vector of a temporal node (idx = {i, k}) or an event
/// (idx = {i, j, k}).
Eigen::VectorXd combine(Operator op, const EmbeddingSet<double>& e, Target target,
                        std::span<const int> idx);

/// Output width of combine().
int feature_dim(Operator op, const EmbeddingSet<double>& e, Target target);

// Splits and instances ----------------------------------------------------

struct SplitSpec {
  std::vector<bool> node_train;  ///< true: train node, false: test node
  std::vector<bool> time_train;
  double fraction = 0.7;
  std::uint64_t seed = 0;
};

/// Independent uniform splits of V and T with round(fraction * n) train
/// members each. Throws DegenerateError when a classification train or test
/// instance set is empty.
SplitSpec make_split(const TimeVaryingGraph& g, double fraction, std::uint64_t seed);

struct SplitList {
  std::vector<SplitSpec> splits;
  int resamples = 0;
};

/// `count` splits seeded from (master_seed, index); degenerate draws are
/// replaced by redrawing with the next seed.
SplitList make_splits(const TimeVaryingGraph& g, int count, double fraction,
                      std::uint64_t master_seed);

/// Active (node, time) pairs inside V_tr x T_tr (train) or V_ts x T_ts.
std::vector<std::pair<int, int>> classification_instances(const TimeVaryingGraph& g,
                                                          const SplitSpec& split, bool train);

struct EventKey {
  int i = 0;
  int j = 0;
  int k = 0;
  friend bool operator==(const EventKey&, const EventKey&) = default;
  friend auto operator<=>(const EventKey&, const EventKey&) = default;
};

struct LabeledEvent {
  EventKey key;
  int label = 0;  ///< 1 for an event of E, 0 for a generated non-event
};

/// Events with i, j in V_tr and k in T_tr (train) or all in the test sets.
std::vector<LabeledEvent> reconstruction_instances(const TimeVaryingGraph& g,
                                                   std::span<const EventKey> non_events,
                                                   const SplitSpec& split, bool train);

/// |E| distinct (i < j, k) tuples with both endpoints active at k and no
/// event between them at k. Rejection sampling uniform over such pairs,
/// then exhaustive fill. Throws InfeasibleError when fewer exist.
std::vector<EventKey> negative_events(const TimeVaryingGraph& g, std::uint64_t seed);

// Classifier --------------------------------------------------------------

struct LogRegConfig {
  double l2 = 1e-4;
  int max_epochs = 500;
  double grad_tol = 1e-6;
  /// z-score features with training statistics before fitting.
  bool standardize = true;
};

struct LogRegModel {
  std::vector<int> classes;  ///< sorted distinct training labels
  Eigen::MatrixXd weights;   ///< features x classes
  Eigen::RowVectorXd bias;
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;
  std::vector<double> loss_history;  ///< objective after each accepted step
  int epochs = 0;
  double grad_norm = 0.0;
};

/// Multinomial logistic regression with L2 penalty, full-batch gradient
/// descent and backtracking (Armijo) line search.
LogRegModel logreg_fit(const Eigen::MatrixXd& features, std::span<const int> labels,
                       const LogRegConfig& cfg = {});
std::vector<int> logreg_predict(const LogRegModel& model, const Eigen::MatrixXd& features);

/// Unweighted mean of per-class F1 over the classes present in `truth`.
double macro_f1(std::span<const int> truth, std::span<const int> predicted);

// Protocols ---------------------------------------------------------------

struct EvalReport {
  std::string task;
  std::string dataset;
  std::string model;
  std::string op;
  int dim = 0;
  std::optional<double> beta;
  std::optional<double> mu;
  double macro_f1_mean = 0.0;
  double macro_f1_std = 0.0;
  int n_runs = 0;
  int n_splits = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<double>> scores;  ///< [run][split]
  nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json report_to_json(const EvalReport& r);

/// Mean and sample standard deviation of a set of scores.
std::pair<double, double> mean_std(std::span<const double> xs);

/// Node-state classification: run r is scored with SIR realization r on
/// every split.
EvalReport run_classification(const TimeVaryingGraph& g, std::span<const EmbeddingSet<double>> runs,
                              std::span<const SirTrajectory> sir_runs,
                              std::span<const SplitSpec> splits, Operator op,
                              const LogRegConfig& cfg = {});

/// Event reconstruction: run r uses non-event set non_events[r].
EvalReport run_reconstruction(const TimeVaryingGraph& g, std::span<const EmbeddingSet<double>> runs,
                              std::span<const std::vector<EventKey>> non_events,
                              std::span<const SplitSpec> splits, Operator op,
                              const LogRegConfig& cfg = {});

}  // namespace hosgns
