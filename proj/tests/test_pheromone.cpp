#include "doctest.h"
#include "macosim/pheromone.hpp"
#include "macosim/rng.hpp"

#include <cmath>

using namespace macosim;

namespace {

RoadNetwork line_net(int edges) {
  std::vector<RoadNode> nodes;
  for (int i = 0; i <= edges; ++i) nodes.push_back(RoadNode{i, false, false, 0, 0});
  std::vector<RoadEdge> es;
  for (int i = 0; i < edges; ++i)
    es.push_back(RoadEdge{i, i, i + 1, 100000, 1});
  return RoadNetwork(std::move(nodes), std::move(es));
}

}  // namespace

TEST_CASE("degenerate init range pins every edge") {
  auto net = line_net(5);
  PheromoneParams p;
  p.tau_init_lo = p.tau_init_hi = 5.0;
  auto field = init_random(net, p, 1);
  for (EdgeId e = 0; e < field.size(); ++e) CHECK(field.value(e) == 5.0);
}

TEST_CASE("init is deterministic in (net, params, seed)") {
  auto net = generate_city(52, 64, 3, kCitySeed);
  PheromoneParams p;
  CHECK(init_random(net, p, 42) == init_random(net, p, 42));
  CHECK(init_random(net, p, 42) != init_random(net, p, 43));
}

TEST_CASE("init sample mean obeys the law of large numbers") {
  auto grid = generate_grid(51, 51, 100, 1, false, 0);
  REQUIRE(grid.edge_count() >= 10000);
  PheromoneParams p;
  p.tau_init_lo = 0.0;
  p.tau_init_hi = 10.0;
  auto field = init_random(grid, p, 7);
  double sum = 0.0;
  for (EdgeId e = 0; e < field.size(); ++e) sum += field.value(e);
  CHECK(std::abs(sum / field.size() - 5.0) < 0.2);
}

TEST_CASE("maco update increments chosen, decrements the rest, clamps both ways") {
  PheromoneParams p;  // inc 1, dec 0.05, bounds [0, 100]

  auto single = PheromoneField({tau_from_double(3.0)});
  auto bumped = maco_update(single, 0, p);
  CHECK(bumped.value(0) == 4.0);

  auto floor3 = PheromoneField({0, 0, 0});
  auto after = maco_update(floor3, 1, p);
  CHECK(after.value(0) == 0.0);
  CHECK(after.value(1) == 1.0);
  CHECK(after.value(2) == 0.0);

  CHECK_THROWS_AS(maco_update(single, 5, p), ValidationError);
}

TEST_CASE("repeated maco updates match the closed form on the chosen edge") {
  PheromoneParams p;
  p.tau_max = 10.0;
  for (int k : {1, 3, 7, 12, 30}) {
    PheromoneField f({tau_from_double(3.0), tau_from_double(8.0)});
    for (int i = 0; i < k; ++i) f = maco_update(f, 0, p);
    CHECK(f.value(0) == std::min(3.0 + k, 10.0));
  }
}

TEST_CASE("evaporation identity, arithmetic, and geometric decay") {
  PheromoneParams p;
  p.rho = 0.0;
  PheromoneField f({tau_from_double(8.0), tau_from_double(2.0)});
  CHECK(evaporate(f, p) == f);

  p.rho = 0.5;
  auto half = evaporate(f, p);
  CHECK(half.value(0) == 4.0);
  CHECK(half.value(1) == 1.0);

  // Decay reaches tau_min exactly once tau_max * (1-rho)^n < resolution.
  p.rho = 0.1;
  int steps = static_cast<int>(
      std::ceil(std::log(1e-6 / 100.0) / std::log(1.0 - p.rho)));
  PheromoneField g({tau_from_double(100.0), tau_from_double(37.5)});
  double prev0 = g.value(0);
  for (int i = 0; i < steps; ++i) {
    g = evaporate(g, p);
    CHECK(g.value(0) <= prev0);
    prev0 = g.value(0);
  }
  CHECK(g.value(0) == p.tau_min);
  CHECK(g.value(1) == p.tau_min);
}

TEST_CASE("aco deposit basics") {
  PheromoneParams p;  // q = 100, tau_max = 100
  PheromoneField f({tau_from_double(1.0), tau_from_double(2.0)});

  CHECK(aco_deposit(f, {}, 1000000, p) == f);  // empty path is a no-op

  std::vector<EdgeId> path{0};
  auto after = aco_deposit(f, path, 1000000, p);  // 1 km
  CHECK(after.value(0) == 100.0);                 // 1 + 100 clamped to tau_max
  CHECK(after.value(1) == 2.0);

  CHECK_THROWS_AS(aco_deposit(f, path, 0, p), ValidationError);
}

TEST_CASE("deposit-then-evaporate never exceeds evaporate-then-deposit") {
  PheromoneParams p;
  p.rho = 0.3;
  std::vector<EdgeId> all{0, 1, 2, 3};
  for (std::uint64_t s = 0; s < 500; ++s) {
    std::vector<TauMicros> tau(4);
    for (int e = 0; e < 4; ++e)
      tau[e] = tau_from_double(
          rng::uniform(rng::draw(s, 11, e), 0.0, 100.0));
    LengthMm len =
        1000 + static_cast<LengthMm>(rng::below(rng::draw(s, 12), 5000000));

    PheromoneField f(tau);
    auto dep_then_evap = evaporate(aco_deposit(f, all, len, p), p);
    auto evap_then_dep = aco_deposit(evaporate(f, p), all, len, p);
    for (EdgeId e = 0; e < 4; ++e)
      CHECK(dep_then_evap.level(e) <= evap_then_dep.level(e));
  }
}

TEST_CASE("bounds hold under random operation sequences") {
  auto net = line_net(6);
  PheromoneParams p;
  p.tau_max = 20.0;
  p.tau_min = 0.5;
  p.tau_init_lo = 0.5;
  p.tau_init_hi = 20.0;
  std::vector<EdgeId> path{1, 2, 3};

  for (std::uint64_t seq = 0; seq < 200; ++seq) {
    auto field = init_random(net, p, seq);
    for (int op = 0; op < 50; ++op) {
      auto pick = rng::below(rng::draw(seq, 21, op), 3);
      if (pick == 0) {
        auto e = static_cast<EdgeId>(rng::below(rng::draw(seq, 22, op), 6));
        field = maco_update(field, e, p);
      } else if (pick == 1) {
        field = evaporate(field, p);
      } else {
        field = aco_deposit(field, path, 2000000, p);
      }
      for (EdgeId e = 0; e < field.size(); ++e) {
        REQUIRE(field.level(e) >= p.min_u());
        REQUIRE(field.level(e) <= p.max_u());
      }
    }
  }
}

TEST_CASE("maco update never lowers the chosen edge relative to any other") {
  PheromoneParams p;
  for (std::uint64_t s = 0; s < 500; ++s) {
    std::vector<TauMicros> tau(5);
    for (int e = 0; e < 5; ++e)
      tau[e] = tau_from_double(rng::uniform(rng::draw(s, 31, e), 0.0, 100.0));
    PheromoneField f(tau);
    auto chosen = static_cast<EdgeId>(rng::below(rng::draw(s, 32), 5));
    auto g = maco_update(f, chosen, p);
    for (EdgeId e = 0; e < 5; ++e) {
      if (e == chosen) continue;
      CHECK(g.level(chosen) - g.level(e) >= f.level(chosen) - f.level(e));
    }
  }
}

TEST_CASE("operations are pure: inputs never mutate") {
  PheromoneParams p;
  PheromoneField f({tau_from_double(7.0), tau_from_double(3.0)});
  PheromoneField copy = f;
  (void)maco_update(f, 0, p);
  (void)evaporate(f, p);
  std::vector<EdgeId> path{1};
  (void)aco_deposit(f, path, 500000, p);
  CHECK(f == copy);
}
