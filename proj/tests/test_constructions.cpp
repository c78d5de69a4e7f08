#include <cmath>
#include <random>

#include "doctest.h"
#include "palab/constructions.hpp"
#include "palab/presets.hpp"

using namespace palab;

namespace {

PrincipalStrategy ex51_opt() { return {{{0.6, {0.5, 0.5}}, {0.4, {0.0, 1.0}}}}; }

}  // namespace

TEST_CASE("robust scheme step by step on the two-state example") {
  auto inst = example_5_1(0.3).to_generalized();
  auto an = analyze(inst);
  auto rs = build_robust_scheme(inst, an, ex51_opt(), AgentStrategy::pure({0, 1}, 2), 0.1, 0.01);
  CHECK(rs.params.theta == doctest::Approx(0.11));
  REQUIRE(rs.pi.size() == 3);
  CHECK(rs.pi.signals[0].decision[0] == doctest::Approx(0.555));
  CHECK(rs.pi.signals[1].decision[0] == doctest::Approx(0.0));
  // mu' = 0.6 * 0.555 = 0.333; ray toward 0.3 exits at Good = 0
  double t = 0.333 / 0.033;
  CHECK(rs.params.eta == doctest::Approx(1.0 / t));
  REQUIRE(rs.params.z.has_value());
  CHECK((*rs.params.z)[0] == doctest::Approx(0.0));
  CHECK(max_abs_diff(rs.pi.mean(), Vec{0.3, 0.7}) < 1e-8);
  CHECK(inst.v(rs.pi.signals[0].decision, 0) - inst.v(rs.pi.signals[0].decision, 1) == doctest::Approx(0.11));
  CHECK(rs.params.eta <= an.diam / *an.dist * rs.params.theta + 1e-9);
  CHECK(best_response_set(inst, rs.pi.signals[0].decision, 0.1) == std::vector<std::size_t>{0});
}

TEST_CASE("robust scheme tends to the optimum as delta and epsilon vanish") {
  auto inst = example_5_1(0.3).to_generalized();
  auto an = analyze(inst);
  auto rs = build_robust_scheme(inst, an, ex51_opt(), AgentStrategy::pure({0, 1}, 2), 0.0, 1e-10);
  CHECK(rs.params.theta < 1e-8);
  CHECK(rs.params.eta < 1e-8);
  CHECK(rs.pi.signals[0].decision[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK_THROWS_AS(build_robust_scheme(inst, an, ex51_opt(), AgentStrategy::pure({0, 1}, 2), 1.0), std::invalid_argument);
}

TEST_CASE("robust scheme meets the deterministic lower bound") {
  for (double mu0 : {0.1, 0.3, 0.45}) {
    auto inst = example_5_1(mu0).to_generalized();
    auto an = analyze(inst);
    for (double delta : {0.0, 0.001, 0.01, 0.04}) {
      if (delta >= an.G * *an.dist / an.diam) continue;
      double eps = 1e-3 * an.G;
      auto rs = build_robust_scheme(inst, an, an.witness.pi, an.witness.rho, delta, eps);
      double worst = worst_case_delta_br(inst, rs.pi, delta, false).value;
      CHECK(worst >= an.U_star - perturbation_constant(an) * (delta / an.G + eps) - 1e-6);
    }
  }
  auto t37 = theorem_3_7_instance(0.04).to_generalized();
  auto an = analyze(t37);
  auto rs = build_robust_scheme(t37, an, an.witness.pi, an.witness.rho, 0.01);
  CHECK(worst_case_delta_br(t37, rs.pi, 0.01, false).value >=
        an.U_star - perturbation_constant(an) * (0.01 / an.G + 1e-3) - 1e-6);

  auto bim = std::get<Instance>(load_preset("stackelberg_demo"));
  auto ban = analyze(bim);
  auto brs = build_robust_scheme(bim, ban, ban.witness.pi, ban.witness.rho, 0.05);
  CHECK(!brs.params.z.has_value());
  CHECK(worst_case_delta_br(bim, brs.pi, 0.05, false).value >=
        ban.U_star - ban.diam * ban.L * (0.05 / ban.G + 1e-3 * ban.G / ban.G) - 1e-6);
}

TEST_CASE("exact best-response embedding") {
  auto inst = example_5_1(0.3).to_generalized();
  auto an = analyze(inst);
  // already exact
  auto e0 = embed_exact_br(inst, an, ex51_opt(), AgentStrategy::pure({0, 1}, 2));
  CHECK(e0.delta == doctest::Approx(0.0));
  CHECK(e0.pi.size() == 2);
  CHECK(e0.pi.signals[0].decision[0] == doctest::Approx(0.5));
  // the tie at 0.5 resolved toward b costs nothing
  auto e1 = embed_exact_br(inst, an, ex51_opt(), AgentStrategy::pure({1, 1}, 2));
  CHECK(e1.delta == doctest::Approx(0.0));
  CHECK(e1.pi.signals[0].decision[0] == doctest::Approx(0.5));
  // a at posterior 0 loses 1, so theta = 1/2 and the piece moves to 0.5
  AgentStrategy rho{{{1.0, 0.0}, {0.5, 0.5}}};
  auto e2 = embed_exact_br(inst, an, ex51_opt(), rho);
  bool found = false;
  for (std::size_t k = 0; k < e2.labels.size(); ++k) {
    if (!e2.labels[k].correction && e2.labels[k].source_signal == 1 && e2.labels[k].action == 0) {
      CHECK(e2.pi.signals[k].decision[0] == doctest::Approx(0.5));
      found = true;
    }
  }
  CHECK(found);
  CHECK(max_abs_diff(e2.pi.mean(), Vec{0.3, 0.7}) < 1e-8);
  for (std::size_t k = 0; k < e2.pi.size(); ++k) {
    auto br = best_response_set(inst, e2.pi.signals[k].decision, 1e-9);
    std::size_t a = e2.labels[k].action;
    CHECK(std::find(br.begin(), br.end(), a) != br.end());
  }
  CHECK(principal_utility(inst, e2.pi, e2.rho) >=
        principal_utility(inst, ex51_opt(), rho) - perturbation_constant(an) * e2.delta / an.G - 1e-6);
}

TEST_CASE("filtering onto delta-optimal actions") {
  auto inst = example_5_1(0.3).to_generalized();
  AgentStrategy tie{{{0.9, 0.1}, {0.0, 1.0}}};
  auto f0 = filter_to_delta_optimal(inst, ex51_opt(), tie, 0.01);
  CHECK(f0.rho.rows == tie.rows);

  AgentStrategy leak{{{1.0, 0.0}, {0.05, 0.95}}};
  auto f1 = filter_to_delta_optimal(inst, ex51_opt(), leak, 0.5);
  CHECK(f1.rho.rows[1] == Vec{0.0, 1.0});
  double measured = best_agent_value(inst, ex51_opt()) - agent_utility(inst, ex51_opt(), leak);
  CHECK(measured == doctest::Approx(0.02));
  double shift = std::abs(principal_utility(inst, ex51_opt(), f1.rho) - principal_utility(inst, ex51_opt(), leak));
  CHECK(shift <= 2.0 * 1.0 * measured / 0.5 + 1e-9);
  CHECK(2.0 * measured / 0.5 == doctest::Approx(0.08));

  AgentStrategy outside{{{1.0, 0.0}, {1.0, 0.0}}};
  auto f2 = filter_to_delta_optimal(inst, ex51_opt(), outside, 0.5);
  CHECK(f2.replaced[1]);
  CHECK(f2.rho.rows[1] == Vec{0.0, 1.0});
}

TEST_CASE("robust scheme at the randomized design margin meets the randomized lower bound") {
  std::vector<Instance> insts = {example_5_1(0.3).to_generalized(), generalized(load_preset("stackelberg_demo"))};
  for (const auto& inst : insts) {
    auto an = analyze(inst);
    const std::string name = an.constrained ? "constrained.under_r" : "unconstrained.under_r";
    for (double delta : {1e-4, 1e-3, 1e-2}) {
      double margin = randomized_design_delta(an, delta);
      CHECK(margin >= delta);
      CHECK(margin <= 0.5 * an.G);
      auto rs = build_robust_scheme(inst, an, an.witness.pi, an.witness.rho, margin, 1e-9);
      double worst = worst_case_delta_br(inst, rs.pi, delta, true).value;
      const auto& b = theorem_bounds(an, delta).at(name);
      if (b.applicable) CHECK(worst >= b.value - 1e-6);
      // at delta itself a randomized responder may undo the scheme
      auto tight = build_robust_scheme(inst, an, an.witness.pi, an.witness.rho, delta, 1e-9);
      CHECK(worst_case_delta_br(inst, tight.pi, delta, true).value <= worst + 1e-9);
    }
  }
  CHECK_THROWS_AS(randomized_design_delta(analyze(example_5_1(0.3).to_generalized()), -1.0), std::invalid_argument);
}
