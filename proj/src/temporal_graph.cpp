// SPDX-License-Identifier: Apache-2.0
#include "hosgns/temporal_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "hosgns/common.hpp"

namespace hosgns {

namespace {

bool event_less(const Event& a, const Event& b) {
  if (a.k != b.k) return a.k < b.k;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

// Canonicalizes, sorts and merges duplicate (i, j, k) entries in place.
void normalize_events(std::vector<Event>& events) {
  for (auto& e : events) {
    if (e.i == e.j) throw DomainError("self-contact event (i == j)");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw DomainError("event weight must be positive and finite");
    if (e.i < 0 || e.j < 0 || e.k < 0) throw DomainError("negative index in event");
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(events.begin(), events.end(), event_less);
  std::size_t out = 0;
  for (std::size_t n = 0; n < events.size(); ++n) {
    if (out > 0 && events[out - 1].i == events[n].i && events[out - 1].j == events[n].j &&
        events[out - 1].k == events[n].k) {
      events[out - 1].weight += events[n].weight;
    } else {
      events[out++] = events[n];
    }
  }
  events.resize(out);
}

// Maps the slice ids used by `events` onto 0..|T|-1 preserving order.
std::vector<std::int64_t> compact_times(std::vector<Event>& events) {
  std::vector<std::int64_t> times;
  times.reserve(events.size());
  for (const auto& e : events) times.push_back(e.k);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (auto& e : events)
    e.k = static_cast<int>(std::lower_bound(times.begin(), times.end(), e.k) - times.begin());
  return times;
}

}  // namespace

TimeVaryingGraph TimeVaryingGraph::from_events(std::vector<Event> events,
                                               std::optional<int> num_nodes) {
  if (events.empty()) throw EmptyGraphError("graph has no events");
  normalize_events(events);
  TimeVaryingGraph g;
  g.time_map_ = compact_times(events);
  std::sort(events.begin(), events.end(), event_less);
  int max_id = 0;
  for (const auto& e : events) max_id = std::max(max_id, e.j);
  g.num_nodes_ = num_nodes.value_or(max_id + 1);
  if (g.num_nodes_ <= max_id) throw DimensionError("event references node beyond num_nodes");
  g.num_times_ = static_cast<int>(g.time_map_.size());
  g.id_map_.resize(static_cast<std::size_t>(g.num_nodes_));
  for (int v = 0; v < g.num_nodes_; ++v) g.id_map_[static_cast<std::size_t>(v)] = v;
  g.events_ = std::move(events);
  g.index();
  return g;
}

void TimeVaryingGraph::index() {
  const auto nt = static_cast<std::size_t>(num_times_);
  const auto nv = static_cast<std::size_t>(num_nodes_);
  slice_offsets_.assign(nt + 1, 0);
  for (const auto& e : events_) ++slice_offsets_[static_cast<std::size_t>(e.k) + 1];
  for (std::size_t k = 0; k < nt; ++k) slice_offsets_[k + 1] += slice_offsets_[k];

  active_.clear();
  active_.reserve(2 * events_.size());
  for (const auto& e : events_) {
    active_.emplace_back(e.i, e.k);
    active_.emplace_back(e.j, e.k);
  }
  std::sort(active_.begin(), active_.end());
  active_.erase(std::unique(active_.begin(), active_.end()), active_.end());

  node_offsets_.assign(nv + 1, 0);
  node_times_.resize(active_.size());
  for (const auto& [v, k] : active_) ++node_offsets_[static_cast<std::size_t>(v) + 1];
  for (std::size_t v = 0; v < nv; ++v) node_offsets_[v + 1] += node_offsets_[v];
  for (std::size_t n = 0; n < active_.size(); ++n) node_times_[n] = active_[n].second;

  time_offsets_.assign(nt + 1, 0);
  for (const auto& [v, k] : active_) ++time_offsets_[static_cast<std::size_t>(k) + 1];
  for (std::size_t k = 0; k < nt; ++k) time_offsets_[k + 1] += time_offsets_[k];
  time_nodes_.resize(active_.size());
  std::vector<std::size_t> cursor(time_offsets_.begin(), time_offsets_.end() - 1);
  for (const auto& [v, k] : active_) time_nodes_[cursor[static_cast<std::size_t>(k)]++] = v;
}

std::span<const Event> TimeVaryingGraph::events_at(int k) const {
  const auto b = slice_offsets_.at(static_cast<std::size_t>(k));
  const auto e = slice_offsets_.at(static_cast<std::size_t>(k) + 1);
  return {events_.data() + b, e - b};
}

bool TimeVaryingGraph::is_active(int node, int time) const {
  if (node < 0 || node >= num_nodes_) return false;
  auto times = active_times(node);
  return std::binary_search(times.begin(), times.end(), time);
}

std::span<const int> TimeVaryingGraph::active_times(int node) const {
  const auto b = node_offsets_.at(static_cast<std::size_t>(node));
  const auto e = node_offsets_.at(static_cast<std::size_t>(node) + 1);
  return {node_times_.data() + b, e - b};
}

std::span<const int> TimeVaryingGraph::active_nodes(int time) const {
  const auto b = time_offsets_.at(static_cast<std::size_t>(time));
  const auto e = time_offsets_.at(static_cast<std::size_t>(time) + 1);
  return {time_nodes_.data() + b, e - b};
}

std::optional<int> TimeVaryingGraph::next_active(int node, int time) const {
  auto times = active_times(node);
  auto it = std::upper_bound(times.begin(), times.end(), time);
  if (it == times.end()) return std::nullopt;
  return *it;
}

double TimeVaryingGraph::weight(int i, int j, int k) const {
  if (i > j) std::swap(i, j);
  if (k < 0 || k >= num_times_) return 0.0;
  auto slice = events_at(k);
  Event probe{i, j, k, 0.0};
  auto it = std::lower_bound(slice.begin(), slice.end(), probe, event_less);
  if (it != slice.end() && it->i == i && it->j == j) return it->weight;
  return 0.0;
}

TimeVaryingGraph parse_contact_lines(std::istream& in, std::int64_t window_seconds) {
  if (window_seconds <= 0) throw DomainError("window_seconds must be positive");
  struct Raw {
    std::int64_t window;
    std::int64_t a;
    std::int64_t b;
  };
  std::vector<Raw> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::int64_t t = 0, a = 0, b = 0;
    if (!(fields >> t >> a >> b)) throw ParseError(lineno, "expected `timestamp id1 id2`");
    std::string extra;
    if (fields >> extra) throw ParseError(lineno, "unexpected trailing field '" + extra + "'");
    if (a == b) throw ParseError(lineno, "self-contact");
    // floor division, also for negative timestamps
    std::int64_t w = t / window_seconds;
    if (t % window_seconds != 0 && t < 0) --w;
    raw.push_back({w, a, b});
  }
  if (raw.empty()) throw EmptyGraphError("no contacts in input");

  std::vector<std::int64_t> ids;
  ids.reserve(2 * raw.size());
  for (const auto& r : raw) {
    ids.push_back(r.a);
    ids.push_back(r.b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<std::int64_t> windows;
  windows.reserve(raw.size());
  for (const auto& r : raw) windows.push_back(r.window);
  std::sort(windows.begin(), windows.end());
  windows.erase(std::unique(windows.begin(), windows.end()), windows.end());

  auto dense = [](const std::vector<std::int64_t>& keys, std::int64_t v) {
    return static_cast<int>(std::lower_bound(keys.begin(), keys.end(), v) - keys.begin());
  };
  std::vector<Event> events;
  events.reserve(raw.size());
  for (const auto& r : raw)
    events.push_back({dense(ids, r.a), dense(ids, r.b), dense(windows, r.window), 1.0});
  normalize_events(events);

  TimeVaryingGraph g;
  g.num_nodes_ = static_cast<int>(ids.size());
  g.num_times_ = static_cast<int>(windows.size());
  g.events_ = std::move(events);
  g.id_map_ = std::move(ids);
  g.time_map_ = std::move(windows);
  g.window_seconds_ = window_seconds;
  g.index();
  return g;
}

GraphStats stats(const TimeVaryingGraph& g) {
  if (g.empty()) throw EmptyGraphError("stats of empty graph");
  GraphStats s;
  s.num_nodes = g.num_nodes();
  s.num_times = g.num_times();
  s.num_events = g.num_events();
  s.num_active = g.num_active();
  double total = 0.0;
  for (const auto& e : g.events()) total += e.weight;
  s.avg_weight = total / static_cast<double>(s.num_events);
  const double v = s.num_nodes;
  const double t = s.num_times;
  s.node_density = static_cast<double>(s.num_active) / (v * t);
  s.link_density = 2.0 * static_cast<double>(s.num_events) / (v * (v - 1.0) * t);
  return s;
}

double graph_volume(const TimeVaryingGraph& g) {
  if (g.empty()) throw EmptyGraphError("volume of empty graph");
  double total = 0.0;
  for (const auto& e : g.events()) total += e.weight;
  return 2.0 * total;
}

nlohmann::json graph_to_json(const TimeVaryingGraph& g) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : g.events()) events.push_back({e.i, e.j, e.k, e.weight});
  nlohmann::json j = {
      {"num_nodes", g.num_nodes()},
      {"num_times", g.num_times()},
      {"events", std::move(events)},
      {"id_map", g.id_map()},
      {"time_map", g.time_map()},
      {"window_seconds", g.window_seconds()},
      {"metadata", {{"empty_windows_dropped", true}, {"times_reindexed", true}}},
  };
  if (!g.node_labels().empty()) j["node_labels"] = g.node_labels();
  return j;
}

TimeVaryingGraph graph_from_json(const nlohmann::json& j) {
  TimeVaryingGraph g;
  g.num_nodes_ = j.at("num_nodes").get<int>();
  g.num_times_ = j.at("num_times").get<int>();
  for (const auto& row : j.at("events")) {
    if (!row.is_array() || row.size() != 4) throw DomainError("event must be [i, j, k, w]");
    g.events_.push_back({row[0].get<int>(), row[1].get<int>(), row[2].get<int>(),
                         row[3].get<double>()});
  }
  if (g.events_.empty()) throw EmptyGraphError("graph document has no events");
  for (const auto& e : g.events_)
    if (e.j >= g.num_nodes_ || e.i >= g.num_nodes_ || e.k >= g.num_times_)
      throw DimensionError("event index out of range");
  normalize_events(g.events_);
  g.id_map_ = j.at("id_map").get<std::vector<std::int64_t>>();
  g.time_map_ = j.at("time_map").get<std::vector<std::int64_t>>();
  g.window_seconds_ = j.value("window_seconds", std::int64_t{0});
  if (j.contains("node_labels")) g.node_labels_ = j["node_labels"].get<std::vector<std::string>>();
  if (g.id_map_.size() != static_cast<std::size_t>(g.num_nodes_) ||
      g.time_map_.size() != static_cast<std::size_t>(g.num_times_))
    throw DimensionError("id_map/time_map size mismatch");
  g.index();
  for (int k = 0; k < g.num_times_; ++k)
    if (g.events_at(k).empty()) throw DomainError("time slice without events");
  return g;
}

nlohmann::json stats_to_json(const GraphStats& s) {
  return {{"num_nodes", s.num_nodes},       {"num_times", s.num_times},
          {"num_events", s.num_events},     {"num_active", s.num_active},
          {"avg_weight", s.avg_weight},     {"node_density", s.node_density},
          {"link_density", s.link_density}};
}

}  // namespace hosgns
