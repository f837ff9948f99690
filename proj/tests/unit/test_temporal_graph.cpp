#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "hosgns/common.hpp"
#include "hosgns/temporal_graph.hpp"
#include "oracles.hpp"

using namespace hosgns;

namespace {

TimeVaryingGraph parse(const std::string& text, std::int64_t window = 600) {
  std::istringstream in(text);
  return parse_contact_lines(in, window);
}

}  // namespace

TEST_CASE("parse merges repeated contacts into weighted events") {
  const auto g = parse(
      "# comment\n"
      "\n"
      "0 5 7\n"
      "20 7 5\n"
      "700 5 9\n");
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_times() == 2);
  REQUIRE(g.num_events() == 2);
  CHECK(g.events()[0] == Event{0, 1, 0, 2.0});
  CHECK(g.events()[1] == Event{0, 2, 1, 1.0});
  CHECK(g.id_map() == std::vector<std::int64_t>{5, 7, 9});
  CHECK(g.time_map() == std::vector<std::int64_t>{0, 1});

  const auto s = stats(g);
  CHECK(s.num_active == 4);
  CHECK(s.avg_weight == doctest::Approx(1.5));
  CHECK(graph_volume(g) == doctest::Approx(6.0));
}

TEST_CASE("empty windows are dropped and times reindexed") {
  const auto g = parse("0 1 2\n6000 1 2\n");
  CHECK(g.num_times() == 2);
  CHECK(g.time_map() == std::vector<std::int64_t>{0, 10});
  CHECK(g.events()[1].k == 1);
}

TEST_CASE("negative timestamps use floor division") {
  const auto g = parse("-1 1 2\n0 1 2\n");
  CHECK(g.num_times() == 2);
  CHECK(g.time_map() == std::vector<std::int64_t>{-1, 0});
}

TEST_CASE("malformed lines report their line number") {
  auto line_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("0 1 2\n# c\n10 x 3\n") == 3);
  CHECK(line_of("0 1 2 9\n") == 1);
  CHECK(line_of("0 1\n") == 1);
  CHECK(line_of("0 4 4\n") == 1);
}

TEST_CASE("input without contacts is an empty graph") {
  CHECK_THROWS_AS(parse("# only a comment\n\n"), EmptyGraphError);
  CHECK_THROWS_AS(parse("0 1 2\n", 0), DomainError);
}

TEST_CASE("from_events canonicalizes, merges and indexes") {
  const auto g = TimeVaryingGraph::from_events({{2, 0, 4, 1.0}, {0, 2, 4, 2.0}, {1, 2, 9, 1.0}});
  REQUIRE(g.num_events() == 2);
  CHECK(g.events()[0] == Event{0, 2, 0, 3.0});
  CHECK(g.num_times() == 2);
  CHECK(g.weight(0, 2, 0) == 3.0);
  CHECK(g.weight(2, 0, 0) == 3.0);
  CHECK(g.weight(0, 1, 0) == 0.0);
  CHECK(g.next_active(2, 0) == 1);
  CHECK_FALSE(g.next_active(0, 0).has_value());
  CHECK(g.is_active(1, 1));
  CHECK_FALSE(g.is_active(1, 0));
  CHECK_THROWS_AS(TimeVaryingGraph::from_events({{1, 1, 0, 1.0}}), DomainError);
  CHECK_THROWS_AS(TimeVaryingGraph::from_events({}), EmptyGraphError);
}

TEST_CASE("json round trip preserves the graph") {
  const auto g = parse("0 10 11\n30 11 12\n900 10 12\n905 10 12\n");
  const auto h = graph_from_json(graph_to_json(g));
  CHECK(h.events() == g.events());
  CHECK(h.id_map() == g.id_map());
  CHECK(h.time_map() == g.time_map());
  CHECK(h.window_seconds() == 600);
  CHECK(h.active_pairs() == g.active_pairs());
}

TEST_CASE("graph invariants on random event lists") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const auto raw = oracle::random_events(rng, 2 + rep % 6, 1 + rep % 7, 0.3);
    const auto g = oracle::to_graph(raw);
    double total = 0.0, expected = 0.0;
    for (const auto& e : g.events()) total += e.weight;
    for (const auto& e : raw) expected += e.w;
    CHECK(total == doctest::Approx(expected));

    std::set<std::pair<int, int>> act;
    for (const auto& e : g.events()) {
      CHECK(e.i < e.j);
      act.insert({e.i, e.k});
      act.insert({e.j, e.k});
    }
    CHECK(std::vector<std::pair<int, int>>(act.begin(), act.end()) == g.active_pairs());
    for (int k = 0; k < g.num_times(); ++k) CHECK_FALSE(g.events_at(k).empty());
  }
}

TEST_CASE("hospital ward data set") {
  std::ifstream in(HOSGNS_DATA_DIR "/lh10/contacts.txt");
  REQUIRE(in);
  const auto s = stats(parse_contact_lines(in, 600));
  // counted on the bundled file
  CHECK(s.num_nodes == 75);
  CHECK(s.num_times == 438);
  CHECK(s.num_events == 7759);
  CHECK(s.num_active == 5467);
}
