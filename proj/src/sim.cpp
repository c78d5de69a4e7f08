#include "palab/sim.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "palab/constructions.hpp"
#include "palab/parallel.hpp"
#include "palab/rng.hpp"

namespace palab {

const char* to_string(SimMode m) { return m == SimMode::Generalized ? "generalized" : "persuasion"; }

SimMode parse_sim_mode(const std::string& s) {
  if (s == "generalized") return SimMode::Generalized;
  if (s == "persuasion") return SimMode::Persuasion;
  throw std::invalid_argument("unknown mode '" + s + "' (expected generalized or persuasion)");
}

const char* to_string(Check c) { return c == Check::LowerBound ? "lower_bound" : "upper_bound"; }

Check parse_check(const std::string& s) {
  if (s == "lower_bound") return Check::LowerBound;
  if (s == "upper_bound") return Check::UpperBound;
  throw std::invalid_argument("unknown check '" + s + "' (expected lower_bound or upper_bound)");
}

void SimConfig::validate() const {
  if (T == 0) throw std::invalid_argument("T must be >= 1");
  if (replicas == 0) throw std::invalid_argument("replicas must be >= 1");
  if (mode == SimMode::Persuasion && !as_persuasion(instance))
    throw std::invalid_argument("persuasion mode needs a persuasion instance");
  generalized(instance).validate();
  static const std::vector<std::string> policies = {"fixed",        "stackelberg",    "no_info",
                                                    "robust_fixed", "mean_exploiter", "adaptive"};
  if (std::find(policies.begin(), policies.end(), policy.kind) == policies.end())
    throw std::invalid_argument("unknown policy kind '" + policy.kind + "'");
  static const std::vector<std::string> learners = {"exp3",          "hedge",   "swap_regret",
                                                    "mean_based",    "best_response", "quantal",
                                                    "inaccurate_belief", "adversarial", "favorable"};
  if (std::find(learners.begin(), learners.end(), learner.kind) == learners.end())
    throw std::invalid_argument("unknown learner kind '" + learner.kind + "'");
  if (policy.kind == "fixed" && !policy.strategy) throw std::invalid_argument("fixed policy needs a strategy");
  if (policy.target != "randomized" && policy.target != "deterministic")
    throw std::invalid_argument("unknown robust target '" + policy.target + "' (expected randomized or deterministic)");
  if (policy.kind == "mean_exploiter" && !as_persuasion(planned()))
    throw std::invalid_argument("mean_exploiter needs a persuasion instance");
  if (planning) {
    const Instance p = generalized(*planning), g = generalized(instance);
    p.validate();
    if (p.dim() != g.dim() || p.n_actions() != g.n_actions() || p.mean != g.mean ||
        p.space.kind() != g.space.kind() || p.space.lo() != g.space.lo() || p.space.hi() != g.space.hi())
      throw std::invalid_argument("planning instance must share the space, actions and mean of the instance");
  }
}

namespace {

constexpr std::uint64_t kLearnerTag = 0x6c6561726e6572ULL;
constexpr std::uint64_t kPilotReplica = 0x70696c6f74ULL;
constexpr int kPilotRounds = 4;

std::unique_ptr<PrincipalPolicy> make_policy(const SimConfig& c, std::optional<double>* used) {
  const Instance inst = generalized(c.planned());
  const auto& k = c.policy.kind;
  if (k == "fixed") return fixed_policy(inst, *c.policy.strategy);
  if (k == "stackelberg") return fixed_policy(inst, stackelberg_value(inst).pi);
  if (k == "no_info") {
    if (!inst.mean) throw std::invalid_argument("no_info policy needs a mean constraint");
    return fixed_policy(inst, PrincipalStrategy{{{1.0, *inst.mean}}});
  }
  if (k == "robust_fixed") {
    if (!c.policy.delta) throw std::logic_error("robust_fixed policy used before resolve()");
    const InstanceAnalysis an = analyze(inst);
    const double margin = c.policy.target == "deterministic" ? *c.policy.delta
                                                               : randomized_design_delta(an, *c.policy.delta);
    auto scheme = build_robust_scheme(inst, an, an.witness.pi, an.witness.rho, margin, c.policy.epsilon);
    *used = c.policy.delta;
    return fixed_policy(inst, scheme.pi);
  }
  if (k == "mean_exploiter") return mean_based_exploiter(*as_persuasion(c.planned()), c.T);
  return adaptive_exploiter(inst, inst.n_signals);
}

std::unique_ptr<ContextualLearner> make_learner(const SimConfig& c, const Instance& inst, std::size_t contexts,
                                                std::uint64_t seed) {
  const auto& L = c.learner;
  const std::size_t n = inst.n_actions();
  const RewardRange range = agent_reward_range(inst);
  auto per_context = [&](auto make) {
    return per_context_wrapper([&](std::size_t s) { return make(hash_key(seed, s)); }, contexts);
  };
  if (L.kind == "exp3")
    return per_context([&](std::uint64_t sd) { return make_exp3(n, range, sd, L.feedback); });
  if (L.kind == "hedge")
    return per_context([&](std::uint64_t sd) { return make_exp3(n, range, sd, FeedbackMode::FullInfo); });
  if (L.kind == "swap_regret")
    return per_context([&](std::uint64_t sd) { return make_swap_regret(n, range, sd, L.feedback); });
  if (L.kind == "mean_based") return mean_based_learner(contexts, n, L.gamma, L.variant, c.T, seed);
  StaticParams p;
  p.lambda = L.lambda;
  p.epsilon = L.epsilon;
  p.delta = L.delta;
  if (L.kind == "best_response") {
    p.kind = StaticKind::Favorable;
    p.delta = 0.0;
  } else if (L.kind == "quantal") {
    p.kind = StaticKind::Quantal;
  } else if (L.kind == "inaccurate_belief") {
    p.kind = StaticKind::InaccurateBelief;
  } else if (L.kind == "adversarial") {
    p.kind = StaticKind::Adversarial;
  } else {
    p.kind = StaticKind::Favorable;
  }
  return make_static_learner(inst, p, seed);
}

bool same_strategy(const PrincipalStrategy& a, const PrincipalStrategy& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t s = 0; s < a.size(); ++s)
    if (a.signals[s].prob != b.signals[s].prob || a.signals[s].decision != b.signals[s].decision) return false;
  return true;
}

// Committed strategy plus what sampling needs, cached per distinct strategy.
struct Committed {
  Vec probs;
  Matrix scheme;  // persuasion mode only
};

}  // namespace

SimConfig resolve(const SimConfig& config) {
  SimConfig out = config;
  if (config.policy.kind != "robust_fixed" || config.policy.delta) return out;
  SimConfig pilot = config;
  pilot.policy.kind = "stackelberg";
  pilot.replicas = 1;
  pilot.keep_rounds = false;
  const double T = static_cast<double>(config.T);
  double delta = run(pilot, kPilotReplica).summary.creg / T;
  // The Stackelberg pilot can understate the regret the learner runs up
  // against the robust scheme (ties cost nothing), so re-measure against the
  // scheme itself until the design delta covers what it induces.
  pilot.policy.kind = "robust_fixed";
  double last_built = delta;
  for (int round = 0; round < kPilotRounds; ++round) {
    pilot.policy.delta = delta;
    double measured = 0.0;
    try {
      measured = run(pilot, kPilotReplica).summary.creg / T;
    } catch (const std::invalid_argument&) {
      // delta is outside the range the construction supports
      if (round > 0) delta = last_built;
      break;
    }
    last_built = delta;
    if (measured <= delta) break;
    delta = measured;
  }
  out.policy.delta = delta;
  return out;
}

RunLog run(const SimConfig& config_in, std::size_t replica) {
  const SimConfig config = resolve(config_in);
  config.validate();
  const Instance inst = generalized(config.instance);
  const PersuasionInstance* pers = config.mode == SimMode::Persuasion ? as_persuasion(config.instance) : nullptr;
  const std::size_t nA = inst.n_actions();

  RunLog log;
  auto policy = make_policy(config, &log.summary.robust_delta);
  const std::size_t contexts = std::max<std::size_t>(policy->n_signals(), 1);
  const std::uint64_t lseed = hash_key(hash_key(config.seed ^ kLearnerTag, replica), config.learner.seed);
  auto learner = make_learner(config, inst, contexts, lseed);

  log.ledger = RegretLedger(contexts, nA);
  RegretLedger realized(contexts, nA);
  if (config.keep_rounds) log.rounds.reserve(config.T);

  std::vector<Committed> committed;
  std::vector<Vec> rho(contexts);
  std::size_t version = 0;
  double sum_u = 0.0, sum_ue = 0.0, sum_v = 0.0;
  Vec r(nA), realized_v(nA);

  for (std::uint64_t t = 1; t <= config.T; ++t) {
    try {
      PolicyView view{t, nullptr};
      if (policy->visibility() == Visibility::AgentMixedStrategy) {
        for (std::size_t s = 0; s < contexts; ++s) rho[s] = learner->mixed_strategy(s);
        view.agent_rho = &rho;
      }
      const PrincipalStrategy& pi = policy->next(view);
      if (pi.size() > contexts) throw std::logic_error("policy emitted more signals than it declared");
      if (log.strategies.empty() || !same_strategy(pi, log.strategies[version])) {
        auto it = std::find_if(log.strategies.begin(), log.strategies.end(),
                               [&](const PrincipalStrategy& q) { return same_strategy(q, pi); });
        if (it == log.strategies.end()) {
          Committed c;
          for (const auto& sig : pi.signals) c.probs.push_back(sig.prob);
          if (pers) c.scheme = decomposition_to_scheme(*pers, pi);
          committed.push_back(std::move(c));
          log.strategies.push_back(pi);
          version = log.strategies.size() - 1;
        } else {
          version = static_cast<std::size_t>(it - log.strategies.begin());
        }
      }
      if (learner->privileged()) learner->observe_strategy(pi);

      CounterRng rng(config.seed, replica, t);
      int omega = -1;
      std::size_t s;
      if (pers) {
        omega = static_cast<int>(rng.categorical(pers->prior));
        s = rng.categorical(committed[version].scheme.row(static_cast<std::size_t>(omega)));
      } else {
        s = rng.categorical(committed[version].probs);
      }
      const Vec& x = pi.signals[s].decision;
      const std::size_t a = learner->choose(s);
      for (std::size_t b = 0; b < nA; ++b) r[b] = inst.v(x, b);
      const double ue = inst.u(x, a);
      double u = ue, v = r[a];
      const Vec* observed = &r;
      if (pers) {
        const auto w = static_cast<std::size_t>(omega);
        for (std::size_t b = 0; b < nA; ++b) realized_v[b] = pers->receiver_v(w, b);
        u = pers->sender_u(w, a);
        v = realized_v[a];
        observed = &realized_v;
        realized.record(s, a, realized_v);
      }
      const bool full = learner->mode() == FeedbackMode::FullInfo;
      learner->feed(s, a, Feedback{(*observed)[a], full ? observed : nullptr});
      log.ledger.record(s, a, r);
      sum_u += u;
      sum_ue += ue;
      sum_v += v;
      if (config.keep_rounds) log.rounds.push_back({t, s, omega, version, a, u, v, r});
    } catch (const std::exception& e) {
      throw std::runtime_error("round " + std::to_string(t) + ": " + e.what());
    }
  }

  auto& sm = log.summary;
  const double T = static_cast<double>(config.T);
  sm.replica = replica;
  sm.T = config.T;
  sm.avg_u = sum_u / T;
  sm.avg_u_expected = sum_ue / T;
  sm.avg_v = sum_v / T;
  const RegretTotals tot = measure_regret(log.ledger);
  sm.creg = tot.creg;
  sm.csreg = tot.csreg;
  sm.creg_per_context = per_context_regret(log.ledger);
  if (pers) {
    const RegretTotals rt = measure_regret(realized);
    sm.creg_realized = rt.creg;
    sm.csreg_realized = rt.csreg;
  }
  sm.distinct_strategies = log.strategies.size();
  return log;
}

Stats describe(const std::vector<double>& xs) {
  Stats st;
  if (xs.empty()) return st;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) st.mean += x;
  st.mean /= n;
  Vec sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size() / 2;
  st.median = sorted.size() % 2 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - st.mean) * (x - st.mean);
    st.sd = std::sqrt(ss / (n - 1.0));
  }
  st.se = st.sd / std::sqrt(n);
  st.ci_lo = st.mean - 1.96 * st.se;
  st.ci_hi = st.mean + 1.96 * st.se;
  return st;
}

ReplicaSummary run_replicas(const SimConfig& config_in, std::size_t workers) {
  const SimConfig config = resolve(config_in);
  config.validate();
  if (workers == 0) workers = worker_count();
  std::vector<RunLog> logs(config.replicas);
  parallel_chunks(config.replicas, config.replicas, workers, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) logs[r] = run(config, r);
  });
  ReplicaSummary out;
  std::vector<double> u, creg, csreg;
  for (auto& log : logs) {
    out.runs.push_back(log.summary);
    u.push_back(log.summary.avg_u);
    creg.push_back(log.summary.creg);
    csreg.push_back(log.summary.csreg);
  }
  out.avg_u = describe(u);
  out.creg = describe(creg);
  out.csreg = describe(csreg);
  if (config.keep_rounds) out.logs = std::move(logs);
  return out;
}

void write_csv(std::ostream& os, const RunLog& log, std::size_t n_actions) {
  os << "t,s,omega,x_index,a,u,v";
  for (std::size_t a = 0; a < n_actions; ++a) os << ",r_" << a;
  os << '\n';
  char buf[64];
  for (const auto& rec : log.rounds) {
    os << rec.t << ',' << rec.s << ',';
    if (rec.omega >= 0) os << rec.omega;
    os << ',' << rec.x_index << ',' << rec.a;
    std::snprintf(buf, sizeof buf, ",%.17g", rec.u);
    os << buf;
    std::snprintf(buf, sizeof buf, ",%.17g", rec.v);
    os << buf;
    for (double x : rec.r) {
      std::snprintf(buf, sizeof buf, ",%.17g", x);
      os << buf;
    }
    os << '\n';
  }
}

BoundInputs bound_inputs(const ReplicaSummary& rs) {
  BoundInputs in;
  in.avg_u = rs.avg_u.mean;
  in.se = rs.avg_u.se;
  in.creg = rs.creg.mean;
  in.csreg = rs.csreg.mean;
  in.T = rs.runs.empty() ? 1 : rs.runs.front().T;
  return in;
}

BoundReport bound_check(const BoundInputs& in, const InstanceAnalysis& an, Check check) {
  BoundReport rep;
  rep.check = check;
  if (in.T == 0) throw std::invalid_argument("bound_check: T must be >= 1");
  const double T = static_cast<double>(in.T);
  rep.delta = (check == Check::LowerBound ? in.creg : in.csreg) / T;
  rep.lhs = in.avg_u;
  const std::string& fam = an.family.family;
  std::string prefix = fam;
  if (fam == "generic") prefix = an.constrained ? "constrained" : "unconstrained";
  rep.bound_name = prefix + (check == Check::LowerBound ? ".under_r" : ".over");
  const BoundSet set = theorem_bounds(an, rep.delta);
  const Bound* b = set.find(rep.bound_name);
  if (!b) {
    rep.note = "no bound of this kind for family " + fam;
    return rep;
  }
  rep.applicable = b->applicable;
  rep.rhs = b->value;
  rep.note = b->note;
  if (!rep.applicable) return rep;
  const double slack = in.se_mult * in.se;
  rep.margin = check == Check::LowerBound ? rep.lhs - (rep.rhs - slack) : (rep.rhs + slack) - rep.lhs;
  rep.pass = rep.margin >= 0.0;
  return rep;
}

}  // namespace palab
