#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "palab/game.hpp"
#include "palab/presets.hpp"

using namespace palab;

namespace {

PrincipalStrategy ex51_opt() { return {{{0.6, {0.5, 0.5}}, {0.4, {0.0, 1.0}}}}; }

}  // namespace

TEST_CASE("principal and agent utility on the two-state example") {
  auto inst = example_5_1(0.3).to_generalized();
  auto rho = AgentStrategy::pure({0, 1}, 2);
  CHECK(principal_utility(inst, ex51_opt(), rho) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(agent_utility(inst, ex51_opt(), rho) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("utility of no-information against action R in the mean-based instance") {
  auto inst = theorem_3_7_instance(0.04).to_generalized();
  PrincipalStrategy noinfo{{{1.0, {0.5, 0.5}}}};
  auto rho = AgentStrategy::pure({2}, 3);
  // u(mu0, R) = 0.5 * (-2) + 0.5 * 2 ; v(mu0, R) = 0
  CHECK(principal_utility(inst, noinfo, rho) == doctest::Approx(0.0));
  CHECK(agent_utility(inst, noinfo, rho) == doctest::Approx(0.0));
}

TEST_CASE("zero and constant utilities") {
  Instance inst;
  inst.space = DecisionSpace::simplex(2);
  inst.actions = {"x", "y"};
  inst.n_signals = 2;
  inst.u_lin = Matrix(2, 2, 0.0);
  inst.u_off = {0.0, 0.0};
  inst.v_lin = Matrix(2, 2, 0.0);
  inst.v_off = {1.0, 1.0};
  inst.validate();
  PrincipalStrategy pi{{{0.5, {1.0, 0.0}}, {0.5, {0.0, 1.0}}}};
  CHECK(principal_utility(inst, pi, AgentStrategy::pure({0, 1}, 2)) == 0.0);
  CHECK(agent_utility(inst, pi, AgentStrategy::uniform(2, 2)) == doctest::Approx(1.0));
}

TEST_CASE("dimension mismatches name the axis") {
  auto inst = example_5_1(0.3).to_generalized();
  auto rho = AgentStrategy::pure({0}, 2);
  try {
    principal_utility(inst, ex51_opt(), rho);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(e.axis() == "signals");
  }
  PrincipalStrategy bad{{{1.0, {1.0, 0.0, 0.0}}}};
  CHECK_THROWS_AS(principal_utility(inst, bad, AgentStrategy::pure({0}, 2)), DimensionError);
}

TEST_CASE("utilities are affine in the agent strategy") {
  auto inst = theorem_3_7_instance(0.04).to_generalized();
  PrincipalStrategy pi{{{0.3, {0.9, 0.1}}, {0.7, {0.2857142857142857, 0.7142857142857143}}}};
  AgentStrategy r1{{{0.2, 0.5, 0.3}, {1.0, 0.0, 0.0}}};
  AgentStrategy r2{{{0.0, 0.0, 1.0}, {0.1, 0.1, 0.8}}};
  for (double lam : {0.0, 0.25, 0.7, 1.0}) {
    AgentStrategy mix;
    for (std::size_t s = 0; s < 2; ++s) mix.rows.push_back(lerp(r2.rows[s], r1.rows[s], lam));
    double expect = lam * principal_utility(inst, pi, r1) + (1 - lam) * principal_utility(inst, pi, r2);
    CHECK(std::abs(principal_utility(inst, pi, mix) - expect) < 1e-12);
    double expect_v = lam * agent_utility(inst, pi, r1) + (1 - lam) * agent_utility(inst, pi, r2);
    CHECK(std::abs(agent_utility(inst, pi, mix) - expect_v) < 1e-12);
  }
}

TEST_CASE("best response sets") {
  auto inst = example_5_1(0.3).to_generalized();
  CHECK(best_response_set(inst, Vec{0.5, 0.5}, 0.0) == std::vector<std::size_t>{0, 1});
  CHECK(best_response_set(inst, Vec{1.0, 0.0}, 0.5) == std::vector<std::size_t>{0});
  CHECK(best_response_set(inst, Vec{0.2, 0.8}, 2.0).size() == 2);
  CHECK_THROWS_AS(best_response_set(inst, Vec{0.7, 0.7}, 0.0), std::invalid_argument);

  auto big = theorem_3_7_instance(0.04).to_generalized();
  for (const auto& x : oracle::simplex_grid(2, 50)) {
    std::vector<std::size_t> prev;
    for (double d : {0.0, 0.01, 0.1, 0.5, 1.0, 3.0}) {
      auto cur = best_response_set(big, x, d);
      for (auto a : prev) CHECK(std::find(cur.begin(), cur.end(), a) != cur.end());
      prev = cur;
    }
    CHECK(prev.size() == 3);
  }
}

TEST_CASE("scheme to decomposition") {
  PersuasionInstance p = example_5_1(0.3);

  Matrix full{{1.0, 0.0}, {0.0, 1.0}};
  PersuasionInstance uniform = p;
  uniform.prior = {0.5, 0.5};
  auto d = scheme_to_decomposition(uniform, full);
  REQUIRE(d.strategy.size() == 2);
  CHECK(d.strategy.signals[0].prob == doctest::Approx(0.5));
  CHECK(d.strategy.signals[0].decision == Vec{1.0, 0.0});
  CHECK(d.strategy.signals[1].decision == Vec{0.0, 1.0});

  Matrix none{{1.0, 0.0}, {1.0, 0.0}};
  d = scheme_to_decomposition(p, none);
  REQUIRE(d.strategy.size() == 1);
  CHECK(d.strategy.signals[0].prob == doctest::Approx(1.0));
  CHECK(max_abs_diff(d.strategy.signals[0].decision, p.prior) < 1e-12);

  Matrix opt{{1.0, 0.0}, {3.0 / 7.0, 4.0 / 7.0}};
  d = scheme_to_decomposition(p, opt);
  REQUIRE(d.strategy.size() == 2);
  CHECK(d.strategy.signals[0].prob == doctest::Approx(0.6));
  CHECK(d.strategy.signals[0].decision[0] == doctest::Approx(0.5));
  CHECK(d.strategy.signals[1].prob == doctest::Approx(0.4));
  CHECK(d.strategy.signals[1].decision[0] == doctest::Approx(0.0));
  CHECK(max_abs_diff(d.strategy.mean(), p.prior) < 1e-9);
}

TEST_CASE("decomposition to scheme inverts and round-trips") {
  PersuasionInstance p = example_5_1(0.3);
  Matrix opt{{1.0, 0.0}, {3.0 / 7.0, 4.0 / 7.0}};
  auto d = scheme_to_decomposition(p, opt);
  Matrix back = decomposition_to_scheme(p, d.strategy);
  for (std::size_t w = 0; w < 2; ++w)
    for (std::size_t s = 0; s < 2; ++s) CHECK(std::abs(back(w, s) - opt(w, d.signal_ids[s])) < 1e-8);

  // randomized schemes over three signals
  std::uint64_t state = 12345;
  auto next = [&] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>((state >> 11) & ((1ULL << 53) - 1)) / static_cast<double>(1ULL << 53);
  };
  for (int trial = 0; trial < 50; ++trial) {
    Matrix sch(2, 3);
    for (std::size_t w = 0; w < 2; ++w) {
      double tot = 0;
      for (std::size_t s = 0; s < 3; ++s) tot += sch(w, s) = next() + 0.01;
      for (std::size_t s = 0; s < 3; ++s) sch(w, s) /= tot;
    }
    auto dd = scheme_to_decomposition(p, sch);
    CHECK(max_abs_diff(dd.strategy.mean(), p.prior) < 1e-9);
    Matrix rt = decomposition_to_scheme(p, dd.strategy);
    for (std::size_t w = 0; w < 2; ++w)
      for (std::size_t s = 0; s < dd.signal_ids.size(); ++s)
        CHECK(std::abs(rt(w, s) - sch(w, dd.signal_ids[s])) < 1e-8);
  }

  PrincipalStrategy implausible{{{1.0, {0.5, 0.5}}}};
  CHECK_THROWS_AS(decomposition_to_scheme(p, implausible), std::invalid_argument);
}
