#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "palab/presets.hpp"
#include "palab/solvers.hpp"

using namespace palab;

namespace {

PrincipalStrategy ex51_opt() { return {{{0.6, {0.5, 0.5}}, {0.4, {0.0, 1.0}}}}; }

// max over grid points of the principal's utility under favourable ties.
double grid_stackelberg_unconstrained(const Instance& inst, std::size_t k) {
  double best = -1e300;
  for (const auto& x : oracle::simplex_grid(inst.dim(), k)) {
    double vmax = -1e300;
    for (std::size_t a = 0; a < inst.n_actions(); ++a) vmax = std::max(vmax, oracle::v_at(inst, x, a));
    for (std::size_t a = 0; a < inst.n_actions(); ++a)
      if (oracle::v_at(inst, x, a) >= vmax - 1e-12) best = std::max(best, oracle::u_at(inst, x, a));
  }
  return best;
}

// Concavification at the prior of a two-state instance via posterior pairs.
double grid_stackelberg_two_state(const Instance& inst, std::size_t k) {
  const double c = (*inst.mean)[0];
  auto value_at = [&](double m) {
    Vec x{m, 1.0 - m};
    double vmax = -1e300, best = -1e300;
    for (std::size_t a = 0; a < inst.n_actions(); ++a) vmax = std::max(vmax, oracle::v_at(inst, x, a));
    for (std::size_t a = 0; a < inst.n_actions(); ++a)
      if (oracle::v_at(inst, x, a) >= vmax - 1e-12) best = std::max(best, oracle::u_at(inst, x, a));
    return best;
  };
  double best = value_at(c);
  for (std::size_t i = 0; i <= k; ++i) {
    double m1 = static_cast<double>(i) / static_cast<double>(k);
    if (m1 > c) break;
    for (std::size_t j = 0; j <= k; ++j) {
      double m2 = static_cast<double>(j) / static_cast<double>(k);
      if (m2 <= c || m2 - m1 < 1e-15) continue;
      double p1 = (m2 - c) / (m2 - m1);
      best = std::max(best, p1 * value_at(m1) + (1 - p1) * value_at(m2));
    }
  }
  return best;
}

Instance random_small_instance(std::mt19937_64& rng, std::size_t d, std::size_t n, bool constrained) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Instance inst;
  inst.space = DecisionSpace::simplex(d);
  for (std::size_t a = 0; a < n; ++a) inst.actions.push_back("a" + std::to_string(a));
  inst.n_signals = n + 1;
  inst.u_lin = Matrix(d, n);
  inst.v_lin = Matrix(d, n);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t a = 0; a < n; ++a) {
      inst.u_lin(i, a) = U(rng);
      inst.v_lin(i, a) = U(rng);
    }
  inst.u_off.assign(n, 0.0);
  inst.v_off.assign(n, 0.0);
  if (constrained) {
    Vec c(d);
    double t = 0;
    for (auto& v : c) t += v = 0.2 + std::abs(U(rng));
    for (auto& v : c) v /= t;
    inst.mean = c;
  }
  return inst;
}

}  // namespace

TEST_CASE("stackelberg value of the presets") {
  CHECK(stackelberg_value(example_5_1(0.3).to_generalized()).value == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(std::abs(stackelberg_value(theorem_3_7_instance(0.04).to_generalized()).value) < 1e-9);
  auto w = stackelberg_value(example_5_1(0.3).to_generalized());
  CHECK(max_abs_diff(w.pi.mean(), Vec{0.3, 0.7}) < 1e-8);
  CHECK(principal_utility(example_5_1(0.3).to_generalized(), w.pi, w.rho) == doctest::Approx(0.6));
}

TEST_CASE("constant principal utility gives U* equal to the constant") {
  auto inst = stackelberg_bimatrix(Matrix{{0.7, 0.7}, {0.7, 0.7}}, Matrix{{1.0, 0.0}, {0.0, 1.0}});
  CHECK(stackelberg_value(inst).value == doctest::Approx(0.7));
  inst.u_lin = Matrix(2, 2, 0.0);
  inst.u_off = {0.25, 0.25};
  CHECK(stackelberg_value(inst).value == doctest::Approx(0.25));
}

TEST_CASE("stackelberg value agrees with grid oracles") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_small_instance(rng, 2, 2 + trial % 2, false);
    double lp = stackelberg_value(inst).value;
    double grid = grid_stackelberg_unconstrained(inst, 1000);
    CHECK(lp >= grid - 1e-9);
    CHECK(lp <= grid + 2e-3 * 4);
  }
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_small_instance(rng, 2, 2 + trial % 2, true);
    double lp = stackelberg_value(inst).value;
    double grid = grid_stackelberg_two_state(inst, 400);
    CHECK(lp >= grid - 1e-9);
    CHECK(lp <= grid + 2e-2);
  }
}

TEST_CASE("inducibility gap and anchors") {
  auto inst = example_5_1(0.3).to_generalized();
  auto gap = inducibility_gap(inst);
  CHECK(gap.G == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(max_abs_diff(gap.anchors[0], Vec{1.0, 0.0}) < 1e-9);
  CHECK(max_abs_diff(gap.anchors[1], Vec{0.0, 1.0}) < 1e-9);
  auto grid = oracle::simplex_grid(2, 10000);
  CHECK(std::abs(oracle::grid_inducibility_gap(inst, grid) - gap.G) < 1e-4);

  auto t37 = theorem_3_7_instance(0.04).to_generalized();
  auto g37 = inducibility_gap(t37);
  CHECK(g37.G > 0.0);
  CHECK(std::abs(oracle::grid_inducibility_gap(t37, grid) - g37.G) < 1e-3);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      if (a != b) CHECK(t37.v(g37.anchors[a], a) - t37.v(g37.anchors[a], b) >= g37.G - 1e-9);
}

TEST_CASE("weakly dominated action gives a nonpositive gap") {
  auto inst = stackelberg_bimatrix(Matrix{{1.0, 0.0}, {0.0, 1.0}}, Matrix{{1.0, 1.0}, {0.5, 0.5}});
  CHECK(inducibility_gap(inst).G <= 0.0);
}

TEST_CASE("analysis constants for the presets") {
  auto an = analyze(example_5_1(0.3).to_generalized());
  CHECK(an.B == doctest::Approx(1.0));
  CHECK(an.L == doctest::Approx(1.0));
  CHECK(an.diam == doctest::Approx(2.0));
  CHECK(*an.dist == doctest::Approx(0.6));
  CHECK(*an.min_mean == doctest::Approx(0.3));
  CHECK(an.norm == Norm::L1);

  auto box = analyze(std::get<Instance>(load_preset("contract_box_demo:P=1.5")));
  CHECK(box.norm == Norm::Linf);
  CHECK(box.diam == doctest::Approx(1.5));
  CHECK(box.L == doctest::Approx(1.0));
  CHECK(box.B <= 1.0 + 1.5 + 1e-12);
  CHECK(box.G > 0.0);
}

TEST_CASE("delta best responses on the two-state example") {
  auto inst = example_5_1(0.3).to_generalized();
  auto pi = ex51_opt();
  CHECK(std::abs(worst_case_delta_br(inst, pi, 0.0, true).value) < 1e-9);
  CHECK(std::abs(worst_case_delta_br(inst, pi, 0.0, false).value) < 1e-12);
  CHECK(best_case_delta_br(inst, pi, 0.1, true).value == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(best_case_delta_br(inst, pi, 0.0, false).value == doctest::Approx(0.6));
  // slack beyond the utility range frees every row
  CHECK(std::abs(worst_case_delta_br(inst, pi, 2.0, true).value) < 1e-9);
  CHECK(best_case_delta_br(inst, pi, 2.0, true).value == doctest::Approx(1.0));

  auto t37 = theorem_3_7_instance(0.04).to_generalized();
  PrincipalStrategy noinfo{{{1.0, {0.5, 0.5}}}};
  CHECK(std::abs(best_case_delta_br(t37, noinfo, 0.0, true).value) < 1e-9);
}

TEST_CASE("unique best response: LP at zero slack equals the exact response") {
  auto inst = theorem_3_7_instance(0.04).to_generalized();
  PrincipalStrategy pi{{{0.5, {0.8, 0.2}}, {0.5, {0.2, 0.8}}}};
  auto br = favorable_best_response(inst, pi);
  CHECK(worst_case_delta_br(inst, pi, 0.0, true).value == doctest::Approx(principal_utility(inst, pi, br)));
}

TEST_CASE("delta best-response LPs agree with vertex enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t d = 1 + trial % 3, n = 1 + (trial / 3) % 3;
    auto inst = random_small_instance(rng, d, n, false);
    std::size_t S = 1 + trial % 3;
    PrincipalStrategy pi;
    double tot = 0;
    for (std::size_t s = 0; s < S; ++s) {
      Vec x(d);
      double t = 0;
      for (auto& v : x) t += v = U(rng) + 1e-3;
      for (auto& v : x) v /= t;
      double w = U(rng) + 0.05;
      tot += w;
      pi.signals.push_back({w, x});
    }
    for (auto& s : pi.signals) s.prob /= tot;
    std::vector<double> probs;
    std::vector<Vec> xs;
    for (auto& s : pi.signals) {
      probs.push_back(s.prob);
      xs.push_back(s.decision);
    }
    for (double delta : {0.0, 0.01, 0.1, 0.5}) {
      CHECK(std::abs(worst_case_delta_br(inst, pi, delta, true).value -
                     oracle::delta_br_vertices(inst, probs, xs, delta, true)) < 1e-6);
      CHECK(std::abs(best_case_delta_br(inst, pi, delta, true).value -
                     oracle::delta_br_vertices(inst, probs, xs, delta, false)) < 1e-6);
    }
  }
}

TEST_CASE("closed-form two-state example values") {
  auto r = example51_analytic(0.3, 0.02);
  CHECK(r.under_R_upper == doctest::Approx(0.6 - 2 * std::sqrt(0.012) + 0.02));
  CHECK(r.under_R_upper == doctest::Approx(0.40091).epsilon(1e-4));
  CHECK(r.over_R_lower == doctest::Approx(0.62));
  CHECK(r.U_star == doctest::Approx(0.6));
  auto z = example51_analytic(0.3, 0.0);
  CHECK(z.under_R_upper == doctest::Approx(0.6));
  CHECK(z.over_R_lower == doctest::Approx(0.6));
  auto s = example51_analytic(0.1, 0.04);
  CHECK(s.under_R_upper == doctest::Approx(0.2 - 2 * std::sqrt(0.008) + 0.04));
  CHECK(s.over_R_lower == doctest::Approx(0.24));
  CHECK_THROWS_AS(example51_analytic(0.6, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(example51_analytic(0.3, 0.2), std::invalid_argument);
}

TEST_CASE("theorem bound plug-ins") {
  auto an = analyze(example_5_1(0.3).to_generalized());
  auto b = theorem_bounds(an, 0.001);
  CHECK(b.at("constrained.over").value == doctest::Approx(0.6 + (2.0 + 2.0 * 2.0 / 0.6) * 0.001));
  CHECK(b.at("constrained.over").value == doctest::Approx(0.60867).epsilon(1e-5));
  CHECK(b.at("constrained.over").applicable);
  CHECK(b.at("persuasion.under_r").value == doctest::Approx(0.6 - 4.0 * std::sqrt((1 + 2 / 0.3) * 0.001)));
  CHECK(b.find("unconstrained.over") == nullptr);

  auto zero = theorem_bounds(an, 0.0);
  for (const auto& bound : zero.bounds) CHECK(bound.value == doctest::Approx(0.6));

  auto too_big = theorem_bounds(an, 0.5);
  CHECK_FALSE(too_big.at("persuasion.over").applicable);

  auto bim = stackelberg_bimatrix(Matrix{{1.0, -1.0}, {-1.0, 1.0}}, Matrix{{-1.0, 1.0}, {1.0, -1.0}});
  auto ban = analyze(bim);
  CHECK(ban.B == doctest::Approx(1.0));
  auto bb = theorem_bounds(ban, 0.01);
  CHECK(bb.at("stackelberg.under_r").value == doctest::Approx(ban.U_star - 4.0 * std::sqrt(0.01 / ban.G)));
  CHECK(filtering_bound(0.5, 1.0, 0.01, 0.1) == doctest::Approx(0.3));
}

TEST_CASE("outer search on the two-state example") {
  auto inst = example_5_1(0.3).to_generalized();
  SearchBudget budget;
  budget.grid = 1000;
  auto zero = search_objectives(inst, 0.0, budget);
  CHECK(zero.method == "grid");
  CHECK(zero.under_d.value < 0.6);
  CHECK(zero.under_d.value > 0.598);
  CHECK(zero.over_r.value == doctest::Approx(0.6).epsilon(1e-9));

  auto s = search_objectives(inst, 0.02, budget);
  auto an = example51_analytic(0.3, 0.02);
  CHECK(s.under_r.value <= an.under_R_upper + 1e-6);
  CHECK(s.over_r.value >= an.over_R_lower - 2e-3);
  CHECK(s.under_r.value <= s.under_d.value);
  CHECK(s.under_d.value <= s.U_star + 1e-12);
  CHECK(s.U_star <= s.over_d.value + 1e-12);
  CHECK(s.over_d.value <= s.over_r.value);
  double persuasion_floor = 0.6 - 4.0 * std::sqrt((1 + 2 / 0.3) * 0.02);
  CHECK(s.under_r.value >= persuasion_floor);
}

TEST_CASE("grid under^R value matches an independent enumeration") {
  auto inst = example_5_1(0.3).to_generalized();
  const double c = 0.3, delta = 0.02;
  const std::size_t k = 1000;
  double best = -1e300;
  for (std::size_t i = 0; i <= k; ++i) {
    double m1 = static_cast<double>(i) / k;
    if (m1 > c) break;
    for (std::size_t j = 0; j <= k; ++j) {
      double m2 = static_cast<double>(j) / k;
      if (m2 <= c) continue;
      double p1 = (m2 - c) / (m2 - m1);
      best = std::max(best, oracle::delta_br_vertices(inst, {p1, 1 - p1}, {{m1, 1 - m1}, {m2, 1 - m2}}, delta, true));
    }
  }
  SearchBudget budget;
  budget.grid = k;
  double lib = search_objectives(inst, delta, budget).under_r.value;
  CHECK(std::abs(lib - best) < 1e-6);
  // pinned regression value
  CHECK(lib == doctest::Approx(0.400910364141).epsilon(1e-9));
}
