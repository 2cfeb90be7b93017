#include "doctest.h"
#include "macosim/rng.hpp"

#include <cmath>

using namespace macosim;

TEST_CASE("draws are pure functions of their keys") {
  CHECK(rng::draw(42, 1, 2, 3) == rng::draw(42, 1, 2, 3));
  CHECK(rng::draw(42, 1, 2, 3) != rng::draw(42, 1, 2, 4));
  CHECK(rng::draw(42, 1, 2, 3) != rng::draw(43, 1, 2, 3));
  CHECK(rng::draw(7, rng::Stream::SpawnPair, 0) !=
        rng::draw(7, rng::Stream::SpawnSpeed, 0));
}

TEST_CASE("unit draws live in [0,1) and look uniform") {
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double u = rng::to_unit(rng::draw(123, 1, i));
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("below stays in range and covers it") {
  bool hit[10] = {};
  for (int i = 0; i < 1000; ++i) {
    auto v = rng::below(rng::draw(9, 2, i), 10);
    REQUIRE(v < 10);
    hit[v] = true;
  }
  for (bool h : hit) CHECK(h);
}

TEST_CASE("uniform hits the requested interval") {
  for (int i = 0; i < 1000; ++i) {
    double v = rng::uniform(rng::draw(5, 3, i), 50.0, 80.0);
    CHECK(v >= 50.0);
    CHECK(v < 80.0);
  }
  CHECK(rng::uniform(rng::draw(5, 3, 0), 5.0, 5.0) == 5.0);
}
