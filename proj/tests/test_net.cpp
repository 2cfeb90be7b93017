#include "doctest.h"
#include "helpers.hpp"
#include "macosim/net.hpp"

#include <set>

using namespace macosim;

namespace {

bool same_network(const RoadNetwork& a, const RoadNetwork& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count())
    return false;
  for (int i = 0; i < a.node_count(); ++i) {
    const RoadNode &x = a.node(i), &y = b.node(i);
    if (x.id != y.id || x.signalized != y.signalized ||
        x.has_position != y.has_position || x.x_m != y.x_m || x.y_m != y.y_m)
      return false;
  }
  for (int i = 0; i < a.edge_count(); ++i) {
    const RoadEdge &x = a.edge(i), &y = b.edge(i);
    if (x.id != y.id || x.from != y.from || x.to != y.to ||
        x.length_mm != y.length_mm || x.lanes != y.lanes)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("minimal network loads") {
  auto net = load_network(R"({
    "nodes": [{"id": 0, "signalized": false}, {"id": 1, "signalized": false}],
    "edges": [{"id": 0, "from": 0, "to": 1, "length_m": 100, "lanes": 1}]
  })");
  CHECK(net.node_count() == 2);
  CHECK(net.edge_count() == 1);
  CHECK(net.edge(0).length_mm == 100000);
}

TEST_CASE("validation names the offending entity") {
  const char* dangling = R"({
    "nodes": [{"id": 0, "signalized": false}, {"id": 1, "signalized": false},
              {"id": 2, "signalized": false}, {"id": 3, "signalized": false},
              {"id": 4, "signalized": false}],
    "edges": [{"id": 0, "from": 0, "to": 99, "length_m": 10, "lanes": 1}]
  })";
  CHECK_THROWS_WITH_AS(load_network(dangling),
                       doctest::Contains("edge 0"), ValidationError);
  CHECK_THROWS_WITH_AS(load_network(dangling),
                       doctest::Contains("99"), ValidationError);

  CHECK_THROWS_AS(load_network(R"({
    "nodes": [{"id": 0, "signalized": false}, {"id": 1, "signalized": false}],
    "edges": [{"id": 0, "from": 0, "to": 1, "length_m": 0, "lanes": 1}]
  })"),
                  ValidationError);

  CHECK_THROWS_AS(load_network(R"({
    "nodes": [{"id": 0, "signalized": false}, {"id": 0, "signalized": false}],
    "edges": []
  })"),
                  ValidationError);

  CHECK_THROWS_WITH_AS(load_network(R"({
    "nodes": [{"id": 0, "signalized": false, "bogus": 1}],
    "edges": []
  })"),
                       doctest::Contains("bogus"), ValidationError);

  CHECK_THROWS_AS(load_network("{not json"), ValidationError);
}

TEST_CASE("duplicate directed edge between one pair rejected") {
  CHECK_THROWS_AS(load_network(R"({
    "nodes": [{"id": 0, "signalized": false}, {"id": 1, "signalized": false}],
    "edges": [{"id": 0, "from": 0, "to": 1, "length_m": 10, "lanes": 1},
              {"id": 1, "from": 0, "to": 1, "length_m": 20, "lanes": 1}]
  })"),
                  ValidationError);
}

TEST_CASE("serialize/load round-trips exactly") {
  auto grid = generate_grid(3, 4, 150, 2, true, 0);
  auto again = load_network(serialize_network(grid));
  CHECK(same_network(grid, again));

  auto city = generate_city(20, 28, 3, 99);
  CHECK(same_network(city, load_network(serialize_network(city))));
}

TEST_CASE("grid generator counts") {
  auto g22 = generate_grid(2, 2, 100, 1, false, 0);
  CHECK(g22.node_count() == 4);
  CHECK(g22.edge_count() == 8);
  int signals = 0;
  for (const RoadNode& n : g22.nodes()) signals += n.signalized;
  CHECK(signals == 0);

  auto g33 = generate_grid(3, 3, 200, 3, true, 0);
  CHECK(g33.node_count() == 9);
  CHECK(g33.edge_count() == 24);
  signals = 0;
  for (const RoadNode& n : g33.nodes()) signals += n.signalized;
  CHECK(signals == 1);
  CHECK(g33.node(4).signalized);  // center of the 3x3

  CHECK_THROWS_AS(generate_grid(1, 5, 100, 1, false, 0), ValidationError);
}

TEST_CASE("generators are pure functions of their arguments") {
  auto a = generate_grid(4, 13, 150, 3, true, 7);
  auto b = generate_grid(4, 13, 150, 3, true, 7);
  CHECK(a.node_count() == 52);
  CHECK(same_network(a, b));

  auto c1 = generate_city(52, 64, 3, kCitySeed);
  auto c2 = generate_city(52, 64, 3, kCitySeed);
  CHECK(same_network(c1, c2));
}

TEST_CASE("city generator hits the requested scale and is strongly connected") {
  auto city = generate_city(52, 64, 3, kCitySeed);
  CHECK(city.node_count() == 52);
  CHECK(city.edge_count() == 128);
  for (const RoadEdge& e : city.edges()) CHECK(e.lanes == 3);

  auto table = all_pairs_distances(city);
  for (NodeId u = 0; u < city.node_count(); ++u)
    for (NodeId v = 0; v < city.node_count(); ++v)
      CHECK(table.reachable(u, v));

  int signals = 0;
  for (const RoadNode& n : city.nodes()) signals += n.signalized;
  CHECK(signals > 5);  // intersections exist for the signal model to matter
}

TEST_CASE("shortest path basics") {
  auto net = load_network(R"({
    "nodes": [{"id": 0, "signalized": false}, {"id": 1, "signalized": false},
              {"id": 2, "signalized": false}],
    "edges": [{"id": 0, "from": 0, "to": 1, "length_m": 10, "lanes": 1},
              {"id": 1, "from": 1, "to": 2, "length_m": 20, "lanes": 1}]
  })");

  auto self = shortest_path(net, 1, 1);
  REQUIRE(self.has_value());
  CHECK(self->path == std::vector<NodeId>{1});
  CHECK(self->distance_mm == 0);

  auto line = shortest_path(net, 0, 2);
  REQUIRE(line.has_value());
  CHECK(line->path == std::vector<NodeId>{0, 1, 2});
  CHECK(line->distance_mm == 30000);

  CHECK_FALSE(shortest_path(net, 2, 0).has_value());
}

TEST_CASE("shortest paths match the Floyd-Warshall oracle on 100 random graphs") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto net = testutil::random_digraph(seed);
    auto fw = testutil::floyd_warshall(net);
    auto table = all_pairs_distances(net);
    const int n = net.node_count();

    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = 0; v < n; ++v) {
        LengthMm expected = fw[static_cast<std::size_t>(u) * n + v];
        REQUIRE(table.dist_mm(u, v) == expected);

        auto sp = shortest_path(net, u, v);
        if (expected == kUnreachableMm) {
          REQUIRE_FALSE(sp.has_value());
          continue;
        }
        REQUIRE(sp.has_value());
        REQUIRE(sp->distance_mm == expected);

        // Path is well formed: consecutive hops are edges and lengths add up.
        REQUIRE(sp->path.front() == u);
        REQUIRE(sp->path.back() == v);
        LengthMm sum = 0;
        for (std::size_t i = 0; i + 1 < sp->path.size(); ++i) {
          auto e = net.edge_between(sp->path[i], sp->path[i + 1]);
          REQUIRE(e.has_value());
          sum += net.edge(*e).length_mm;
        }
        REQUIRE(sum == expected);

        // Tie-break: lexicographically smallest shortest path.
        REQUIRE(sp->path == testutil::fw_lexi_path(net, fw, u, v));

        // next_hop consistency with the same tie-break.
        if (u != v) REQUIRE(table.next_hop(u, v) == sp->path[1]);
      }
    }
  }
}

TEST_CASE("all-pairs table basics and triangle inequality") {
  auto one = RoadNetwork({RoadNode{0, false, false, 0, 0}}, {});
  auto t1 = all_pairs_distances(one);
  CHECK(t1.dist_mm(0, 0) == 0);

  auto net = load_network(R"({
    "nodes": [{"id": 0, "signalized": false}, {"id": 1, "signalized": false}],
    "edges": [{"id": 0, "from": 0, "to": 1, "length_m": 50, "lanes": 1}]
  })");
  auto t2 = all_pairs_distances(net);
  CHECK(t2.dist_mm(0, 1) == 50000);
  CHECK_FALSE(t2.reachable(1, 0));

  auto grid = generate_grid(4, 4, 120, 1, false, 0);
  auto t3 = all_pairs_distances(grid);
  const int n = grid.node_count();
  for (NodeId u = 0; u < n; ++u) {
    CHECK(t3.dist_mm(u, u) == 0);
    for (NodeId v = 0; v < n; ++v)
      for (NodeId w = 0; w < n; ++w)
        CHECK(t3.dist_mm(u, w) <= t3.dist_mm(u, v) + t3.dist_mm(v, w));
  }
}

TEST_CASE("adjacent neighbors") {
  auto net = load_network(R"({
    "nodes": [{"id": 0, "signalized": false}, {"id": 1, "signalized": false}],
    "edges": [{"id": 0, "from": 0, "to": 1, "length_m": 50, "lanes": 1}]
  })");
  CHECK(adjacent_neighbors(net, 1).empty());

  auto grid = generate_grid(3, 3, 100, 1, false, 0);
  auto center = adjacent_neighbors(grid, 4);
  CHECK(center.size() == 4);
  for (std::size_t i = 1; i < center.size(); ++i)
    CHECK(center[i - 1].neighbor < center[i].neighbor);

  auto city = generate_city(52, 64, 3, kCitySeed);
  std::size_t total = 0;
  for (NodeId u = 0; u < city.node_count(); ++u)
    total += adjacent_neighbors(city, u).size();
  CHECK(total == 128);
}
