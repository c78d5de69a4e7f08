#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "palab/lp.hpp"

using namespace palab;

TEST_CASE("textbook maximization") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
  LpProblem lp(2);
  lp.set_objective({3.0, 5.0});
  lp.add_row({1.0, 0.0}, Sense::Le, 4.0);
  lp.add_row({0.0, 2.0}, Sense::Le, 12.0);
  lp.add_row({3.0, 2.0}, Sense::Le, 18.0);
  auto sol = solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.value == doctest::Approx(36.0));
  CHECK(sol.x[0] == doctest::Approx(2.0));
  CHECK(sol.x[1] == doctest::Approx(6.0));
}

TEST_CASE("infeasible and unbounded are reported") {
  LpProblem inf(1);
  inf.add_row({1.0}, Sense::Ge, 2.0);
  inf.add_row({1.0}, Sense::Le, 1.0);
  CHECK(solve(inf).status == LpStatus::Infeasible);

  LpProblem unb(2);
  unb.set_objective({1.0, 1.0});
  unb.add_row({1.0, -1.0}, Sense::Le, 1.0);
  CHECK(solve(unb).status == LpStatus::Unbounded);
  CHECK_THROWS_AS(solve_or_throw(unb, "test"), std::runtime_error);
}

TEST_CASE("free and bounded variables, negative right-hand sides") {
  // min x + y with x free, y in [-3, 2], x - y >= -4, x + y >= -6
  LpProblem lp(2, false);
  lp.set_objective({1.0, 1.0});
  lp.set_bounds(0, -kInf, kInf);
  lp.set_bounds(1, -3.0, 2.0);
  lp.add_row({1.0, -1.0}, Sense::Ge, -4.0);
  lp.add_row({1.0, 1.0}, Sense::Ge, -6.0);
  auto sol = solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.value == doctest::Approx(-6.0));
  CHECK(lp.max_violation(sol.x) < 1e-9);

  LpProblem up(1);
  up.set_objective({-1.0});
  up.set_bounds(0, -kInf, 5.0);
  up.add_row({1.0}, Sense::Ge, -2.5);
  auto s2 = solve(up);
  REQUIRE(s2.status == LpStatus::Optimal);
  CHECK(s2.x[0] == doctest::Approx(-2.5));
}

TEST_CASE("redundant equality rows are dropped") {
  LpProblem lp(3);
  lp.set_objective({1.0, 2.0, 3.0});
  lp.add_row({1.0, 1.0, 1.0}, Sense::Eq, 1.0);
  lp.add_row({2.0, 2.0, 2.0}, Sense::Eq, 2.0);
  lp.add_row({1.0, 0.0, 1.0}, Sense::Eq, 0.5);
  auto sol = solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.value == doctest::Approx(0.5 * 2 + 0.5 * 3));
}

TEST_CASE("random bounded LPs agree with vertex enumeration") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 2 + trial % 3;
    std::size_t m = 1 + trial % 4;
    LpProblem lp(n, trial % 2 == 0);
    Vec c(n);
    for (auto& v : c) v = U(rng);
    lp.set_objective(c);
    for (std::size_t j = 0; j < n; ++j) lp.set_bounds(j, -1.0 - (trial % 2), 1.0 + 0.5 * (j % 2));
    for (std::size_t i = 0; i < m; ++i) {
      Vec a(n);
      for (auto& v : a) v = U(rng);
      Sense s = i % 3 == 0 ? Sense::Le : i % 3 == 1 ? Sense::Ge : Sense::Eq;
      lp.add_row(a, s, 0.5 * U(rng));
    }
    auto sol = solve(lp);
    auto ref = oracle::vertex_enumeration(lp);
    if (!ref) {
      CHECK(sol.status == LpStatus::Infeasible);
      continue;
    }
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(std::abs(sol.value - *ref) < 1e-7);
    CHECK(lp.max_violation(sol.x) < 1e-8);
    ++checked;
  }
  CHECK(checked > 150);
}
