// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace hosgns {

/// Undirected weighted contact between nodes `i` and `j` during slice `k`.
/// Stored canonically with i < j.
struct Event {
  int i = 0;
  int j = 0;
  int k = 0;
  double weight = 1.0;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Discrete-time weighted time-varying graph H = (V, E, T).
///
/// Events are kept sorted by (k, i, j) with no duplicates. Every time slice
/// 0..num_times()-1 hosts at least one event. Immutable once built.
class TimeVaryingGraph {
 public:
  TimeVaryingGraph() = default;

  /// Builds a graph from events given in any orientation and order.
  /// Duplicate (i, j, k) contributions are summed, time indices are compacted
  /// so that empty slices disappear, and `num_nodes` defaults to max id + 1.
  static TimeVaryingGraph from_events(std::vector<Event> events,
                                      std::optional<int> num_nodes = std::nullopt);

  int num_nodes() const noexcept { return num_nodes_; }
  int num_times() const noexcept { return num_times_; }
  std::size_t num_events() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

  const std::vector<Event>& events() const noexcept { return events_; }
  /// Events of slice k (contiguous subrange of events()).
  std::span<const Event> events_at(int k) const;

  /// Raw identifier of each dense node index.
  const std::vector<std::int64_t>& id_map() const noexcept { return id_map_; }
  /// Raw window index (or original slice index) of each dense time index.
  const std::vector<std::int64_t>& time_map() const noexcept { return time_map_; }
  std::int64_t window_seconds() const noexcept { return window_seconds_; }
  const std::vector<std::string>& node_labels() const noexcept { return node_labels_; }

  /// Active (node, time) pairs sorted by (node, time).
  const std::vector<std::pair<int, int>>& active_pairs() const noexcept { return active_; }
  std::size_t num_active() const noexcept { return active_.size(); }
  bool is_active(int node, int time) const;
  /// Sorted active times of a node.
  std::span<const int> active_times(int node) const;
  /// Sorted active nodes at a time.
  std::span<const int> active_nodes(int time) const;
  /// First active time of `node` strictly after `time`, if any.
  std::optional<int> next_active(int node, int time) const;
  /// Weight of the event between i and j at k; 0 when absent.
  double weight(int i, int j, int k) const;

 private:
  friend TimeVaryingGraph parse_contact_lines(std::istream&, std::int64_t);
  friend TimeVaryingGraph graph_from_json(const nlohmann::json&);
  void index();

  int num_nodes_ = 0;
  int num_times_ = 0;
  std::vector<Event> events_;
  std::vector<std::size_t> slice_offsets_;
  std::vector<std::int64_t> id_map_;
  std::vector<std::int64_t> time_map_;
  std::int64_t window_seconds_ = 0;
  std::vector<std::string> node_labels_;
  std::vector<std::pair<int, int>> active_;
  std::vector<std::size_t> node_offsets_;
  std::vector<int> node_times_;
  std::vector<std::size_t> time_offsets_;
  std::vector<int> time_nodes_;
};

struct GraphStats {
  int num_nodes = 0;
  int num_times = 0;
  std::size_t num_events = 0;
  std::size_t num_active = 0;
  double avg_weight = 0.0;
  double node_density = 0.0;
  double link_density = 0.0;
};

/// Parses `timestamp id1 id2` lines (`#` comments and blank lines skipped),
/// bins timestamps into floor(t / window_seconds) windows, counts repeated
/// contacts as event weight, drops empty windows and densely remaps ids.
/// Throws ParseError (with line number) or EmptyGraphError.
TimeVaryingGraph parse_contact_lines(std::istream& in, std::int64_t window_seconds);

GraphStats stats(const TimeVaryingGraph& g);

/// Total interaction weight over ordered pairs: 2 * sum of event weights.
double graph_volume(const TimeVaryingGraph& g);

nlohmann::json graph_to_json(const TimeVaryingGraph& g);
TimeVaryingGraph graph_from_json(const nlohmann::json& j);
nlohmann::json stats_to_json(const GraphStats& s);

}  // namespace hosgns
