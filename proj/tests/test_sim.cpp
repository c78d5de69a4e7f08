#include <cmath>
#include <sstream>

#include "doctest.h"
#include "palab/game.hpp"
#include "palab/presets.hpp"
#include "palab/sim.hpp"

using namespace palab;

namespace {

SimConfig base_config(std::uint64_t T) {
  SimConfig c;
  c.instance = example_5_1(0.3);
  c.T = T;
  c.seed = 42;
  return c;
}

}  // namespace

TEST_CASE("single round with a point-mass strategy is fully determined") {
  SimConfig c = base_config(1);
  c.policy.kind = "fixed";
  c.policy.strategy = PrincipalStrategy{{{1.0, {0.3, 0.7}}}};
  c.learner.kind = "best_response";
  c.keep_rounds = true;
  auto log = run(c);
  REQUIRE(log.rounds.size() == 1);
  const auto& r = log.rounds[0];
  CHECK(r.s == 0);
  CHECK(r.omega == -1);
  CHECK(r.a == 1);  // v(prior, a) = 0.3 - 0.7 < 0 = v(prior, b)
  CHECK(r.u == 0.0);
  CHECK(r.r[0] == doctest::Approx(-0.4));
  CHECK(log.summary.creg == 0.0);
}

TEST_CASE("stackelberg scheme against an exact best responder earns U*") {
  SimConfig c = base_config(10000);
  c.learner.kind = "best_response";
  auto log = run(c);
  const double sigma = std::sqrt(0.6 * 0.4 / 10000.0);
  CHECK(std::abs(log.summary.avg_u - 0.6) <= 3 * sigma);
  CHECK(log.summary.creg == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(log.summary.distinct_strategies == 1);

  SimConfig p = c;
  p.mode = SimMode::Persuasion;
  auto plog = run(p);
  CHECK(std::abs(plog.summary.avg_u_expected - log.summary.avg_u_expected) <= 6 * sigma);
  CHECK(std::abs(plog.summary.avg_u - 0.6) <= 3 * sigma);
}

TEST_CASE("run is reproducible and replicas reduce deterministically") {
  SimConfig c = base_config(2000);
  c.learner.kind = "exp3";
  c.replicas = 4;
  auto a = run_replicas(c, 1);
  auto b = run_replicas(c, 3);
  REQUIRE(a.runs.size() == 4);
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(a.runs[r].avg_u == b.runs[r].avg_u);
    CHECK(a.runs[r].creg == b.runs[r].creg);
  }
  CHECK(a.avg_u.mean == b.avg_u.mean);
  CHECK(a.runs[0].avg_u != a.runs[1].avg_u);

  SimConfig one = c;
  one.replicas = 1;
  CHECK(run_replicas(one, 1).runs[0].avg_u == run(c, 0).summary.avg_u);

  c.keep_rounds = true;
  std::ostringstream x, y;
  write_csv(x, run(c, 2), 2);
  write_csv(y, run(c, 2), 2);
  CHECK(x.str() == y.str());
  CHECK(x.str().rfind("t,s,omega,x_index,a,u,v,r_0,r_1\n", 0) == 0);
}

TEST_CASE("ledger regret equals the empirical deviation gain") {
  // For a fixed strategy the rewards per signal never change, so creg is
  // T (V(pi_hat, d*) - V(pi_hat, rho_hat)) with empirical frequencies.
  SimConfig c = base_config(5000);
  c.learner.kind = "exp3";
  c.keep_rounds = true;
  auto log = run(c);
  const auto inst = example_5_1(0.3).to_generalized();
  const auto& pi = log.strategies[0];
  std::vector<double> count(pi.size(), 0.0);
  std::vector<Vec> freq(pi.size(), Vec(2, 0.0));
  for (const auto& rec : log.rounds) {
    count[rec.s] += 1;
    freq[rec.s][rec.a] += 1;
  }
  PrincipalStrategy pi_hat = pi;
  AgentStrategy rho_hat;
  for (std::size_t s = 0; s < pi.size(); ++s) {
    pi_hat.signals[s].prob = count[s] / 5000.0;
    Vec row(2, 0.5);
    if (count[s] > 0) row = {freq[s][0] / count[s], freq[s][1] / count[s]};
    rho_hat.rows.push_back(row);
  }
  const double identity = 5000.0 * (best_agent_value(inst, pi_hat) - agent_utility(inst, pi_hat, rho_hat));
  CHECK(log.summary.creg == doctest::Approx(identity).epsilon(1e-9));
}

TEST_CASE("persuasion mode signal frequencies match the strategy") {
  SimConfig c = base_config(100000);
  c.mode = SimMode::Persuasion;
  c.learner.kind = "best_response";
  c.keep_rounds = true;
  auto log = run(c);
  const auto& pi = log.strategies[0];
  std::vector<double> count(pi.size(), 0.0);
  double B = 1.0;
  bool bounded = true;
  for (const auto& rec : log.rounds) {
    count[rec.s] += 1;
    bounded = bounded && std::abs(rec.u) <= B && std::abs(rec.v) <= B;
  }
  CHECK(bounded);
  double chi2 = 0.0;
  std::size_t df = 0;
  for (std::size_t s = 0; s < pi.size(); ++s) {
    const double e = pi.signals[s].prob * 100000.0;
    if (e <= 0) continue;
    chi2 += (count[s] - e) * (count[s] - e) / e;
    ++df;
  }
  // p > 1e-6 for at most 2 degrees of freedom means chi2 < 27.6.
  CHECK(df <= 3);
  CHECK(chi2 < 27.6);
}

TEST_CASE("mean-based run switches strategies once") {
  SimConfig c;
  c.instance = theorem_3_7_instance(0.01);
  c.mode = SimMode::Persuasion;
  c.policy.kind = "mean_exploiter";
  c.learner.kind = "mean_based";
  c.learner.feedback = FeedbackMode::FullInfo;
  c.T = 1001;
  auto log = run(c);
  CHECK(log.strategies.size() == 2);
  CHECK_THROWS_AS(run([] {
                    SimConfig g;
                    g.instance = example_5_1(0.3);
                    g.policy.kind = "mean_exploiter";
                    return g;
                  }()),
                  std::invalid_argument);
}

TEST_CASE("robust fixed policy resolves a pilot delta") {
  SimConfig c = base_config(4000);
  c.policy.kind = "robust_fixed";
  auto r = resolve(c);
  REQUIRE(r.policy.delta);
  CHECK(*r.policy.delta > 0.0);
  CHECK(*r.policy.delta < 1.0);
  auto log = run(r);
  CHECK(log.summary.robust_delta == r.policy.delta);
  CHECK(resolve(r).policy.delta == r.policy.delta);
}

TEST_CASE("adaptive exploiter against a swap-regret learner runs") {
  SimConfig c = base_config(300);
  c.policy.kind = "adaptive";
  c.learner.kind = "swap_regret";
  c.learner.feedback = FeedbackMode::FullInfo;
  auto log = run(c);
  CHECK(log.summary.csreg >= log.summary.creg);
}

TEST_CASE("bound check") {
  const auto inst = example_5_1(0.3).to_generalized();
  const auto an = analyze(inst);
  BoundInputs in;
  in.avg_u = 0.6;
  in.T = 1000;
  auto lo = bound_check(in, an, Check::LowerBound);
  CHECK(lo.bound_name == "persuasion.under_r");
  CHECK(lo.applicable);
  CHECK(lo.rhs == doctest::Approx(0.6));
  CHECK(lo.pass);
  auto hi = bound_check(in, an, Check::UpperBound);
  CHECK(hi.bound_name == "persuasion.over");
  CHECK(hi.pass);
  in.avg_u = 0.7;
  CHECK_FALSE(bound_check(in, an, Check::UpperBound).pass);
  in.se = 0.04;
  CHECK(bound_check(in, an, Check::UpperBound).pass);
  in.creg = 1000.0;  // delta = 1 is beyond the range
  auto out = bound_check(in, an, Check::LowerBound);
  CHECK_FALSE(out.applicable);
  CHECK_FALSE(out.pass);
  CHECK_THROWS_AS(parse_check("nope"), std::invalid_argument);
}

TEST_CASE("stats") {
  auto st = describe({1, 2, 3, 4});
  CHECK(st.mean == 2.5);
  CHECK(st.median == 2.5);
  CHECK(st.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(st.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2));
  CHECK(describe({7}).sd == 0.0);
}
