#include <cmath>

#include "doctest.h"
#include "palab/space.hpp"

using namespace palab;

TEST_CASE("simplex membership and geometry") {
  auto s = DecisionSpace::simplex(3);
  CHECK(s.contains(Vec{0.2, 0.3, 0.5}));
  CHECK_FALSE(s.contains(Vec{0.2, 0.3, 0.6}));
  CHECK_FALSE(s.contains(Vec{-0.1, 0.6, 0.5}));
  CHECK_FALSE(s.contains(Vec{0.5, 0.5}));
  CHECK(s.diameter(Norm::L1) == 2.0);
  CHECK(s.diameter(Norm::Linf) == 1.0);
  CHECK(s.boundary_distance(Vec{0.3, 0.3, 0.4}) == doctest::Approx(0.6));
  CHECK(s.natural_norm() == Norm::L1);
}

TEST_CASE("box membership and geometry") {
  auto b = DecisionSpace::box({0.0, -1.0}, {2.0, 1.0});
  CHECK(b.contains(Vec{1.0, 0.0}));
  CHECK_FALSE(b.contains(Vec{2.1, 0.0}));
  CHECK(b.diameter(Norm::Linf) == 2.0);
  CHECK(b.diameter(Norm::L1) == 4.0);
  CHECK(b.boundary_distance(Vec{0.5, 0.0}) == doctest::Approx(0.5));
  CHECK(b.vertices().size() == 4);
  CHECK_THROWS_AS(DecisionSpace::box({1.0}, {0.0}), std::invalid_argument);
}

TEST_CASE("ray exit time lands on the boundary") {
  auto s = DecisionSpace::simplex(2);
  Vec from{0.333, 0.667};
  Vec dir{0.3 - 0.333, 0.7 - 0.667};
  double t = s.exit_time(from, dir);
  Vec z = lerp(from, Vec{from[0] + dir[0], from[1] + dir[1]}, t);
  CHECK(z[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(t == doctest::Approx(0.333 / 0.033));

  auto b = DecisionSpace::box({0.0, 0.0}, {1.0, 1.0});
  CHECK(b.exit_time(Vec{0.5, 0.5}, Vec{1.0, 0.25}) == doctest::Approx(0.5));
}

TEST_CASE("affine extrema match vertex evaluation") {
  auto b = DecisionSpace::box({0.0, 0.0, 0.0}, {1.0, 2.0, 3.0});
  Vec lin{1.0, -2.0, 0.5};
  double lo = 1e9, hi = -1e9;
  for (const auto& v : b.vertices()) {
    double val = 0.25 + dot(lin, v);
    lo = std::min(lo, val);
    hi = std::max(hi, val);
  }
  CHECK(b.min_affine(lin, 0.25) == doctest::Approx(lo));
  CHECK(b.max_affine(lin, 0.25) == doctest::Approx(hi));
}
