#include "palab/principals.hpp"

#include <stdexcept>

#include "lifted.hpp"
#include "palab/lp.hpp"

namespace palab {

const char* to_string(Visibility v) {
  switch (v) {
    case Visibility::None: return "none";
    case Visibility::History: return "history";
    case Visibility::AgentMixedStrategy: return "agent_mixed_strategy";
  }
  return "?";
}

namespace {

class Fixed final : public PrincipalPolicy {
 public:
  explicit Fixed(PrincipalStrategy pi) : pi_(std::move(pi)) {}
  const PrincipalStrategy& next(const PolicyView&) override { return pi_; }
  Visibility visibility() const override { return Visibility::None; }
  std::size_t n_signals() const override { return pi_.size(); }
  std::string name() const override { return "fixed"; }

 private:
  PrincipalStrategy pi_;
};

class MeanExploiter final : public PrincipalPolicy {
 public:
  MeanExploiter(const PersuasionInstance& p, std::uint64_t T) : switch_at_((T + 1) / 2) {
    const Vec& mu = p.prior;
    first_.signals = {{mu[0], {1.0, 0.0}}, {mu[1], {0.0, 1.0}}};
    second_.signals = {{mu[1], {0.0, 1.0}}, {mu[0], {1.0, 0.0}}};
  }
  const PrincipalStrategy& next(const PolicyView& view) override {
    return view.t <= switch_at_ ? first_ : second_;
  }
  Visibility visibility() const override { return Visibility::None; }
  std::size_t n_signals() const override { return 2; }
  std::string name() const override { return "mean_exploiter"; }

 private:
  std::uint64_t switch_at_;
  PrincipalStrategy first_, second_;
};

class Adaptive final : public PrincipalPolicy {
 public:
  Adaptive(const Instance& inst, std::size_t n_signals) : inst_(inst), n_signals_(n_signals) {}
  const PrincipalStrategy& next(const PolicyView& view) override {
    if (!view.agent_rho) throw std::invalid_argument("adaptive exploiter needs the agent's mixed strategy");
    last_ = best_strategy_against(inst_, *view.agent_rho, n_signals_).pi;
    return last_;
  }
  Visibility visibility() const override { return Visibility::AgentMixedStrategy; }
  std::size_t n_signals() const override { return n_signals_; }
  std::string name() const override { return "adaptive"; }

 private:
  Instance inst_;
  std::size_t n_signals_;
  PrincipalStrategy last_;
};

}  // namespace

std::unique_ptr<PrincipalPolicy> fixed_policy(const Instance& inst, PrincipalStrategy pi) {
  validate_strategy(inst, pi);
  return std::make_unique<Fixed>(std::move(pi));
}

std::unique_ptr<PrincipalPolicy> mean_based_exploiter(const PersuasionInstance& p, std::optional<std::uint64_t> T) {
  if (!T || *T == 0) throw std::invalid_argument("mean_based_exploiter: needs the horizon T");
  p.validate();
  if (p.states.size() != 2 || p.actions.size() != 3)
    throw std::invalid_argument("mean_based_exploiter: needs a two-state, three-action instance");
  return std::make_unique<MeanExploiter>(p, *T);
}

AdaptiveResult best_strategy_against(const Instance& inst, const std::vector<Vec>& rho, std::size_t n_signals) {
  if (rho.size() != n_signals) throw DimensionError("signals", n_signals, rho.size());
  const std::size_t d = inst.dim(), n = inst.n_actions(), stride = d + 1;
  LpProblem lp(n_signals * stride);
  for (std::size_t s = 0; s < n_signals; ++s) {
    if (rho[s].size() != n) throw DimensionError("actions", n, rho[s].size());
    for (std::size_t i = 0; i < d; ++i) {
      double c = 0.0;
      for (std::size_t a = 0; a < n; ++a) c += rho[s][a] * inst.u_lin(i, a);
      lp.set_objective(s * stride + i, c);
    }
    double c0 = 0.0;
    for (std::size_t a = 0; a < n; ++a) c0 += rho[s][a] * inst.u_off[a];
    lp.set_objective(s * stride + d, c0);
    detail::add_lifted_space_rows(lp, inst.space, s * stride, s * stride + d);
  }
  detail::add_lifted_mean_rows(lp, inst, n_signals, stride, d);
  const LpSolution sol = solve_or_throw(lp, "adaptive exploiter");

  AdaptiveResult out;
  out.value = sol.value;
  double total = 0.0;
  for (std::size_t s = 0; s < n_signals; ++s) {
    const double p = std::max(sol.x[s * stride + d], 0.0);
    Vec x(d);
    if (p > 1e-12) {
      for (std::size_t i = 0; i < d; ++i) x[i] = sol.x[s * stride + i] / p;
      x = inst.space.clamp(x);
    } else {
      x = inst.space.center();
    }
    out.pi.signals.push_back({p > 1e-12 ? p : 0.0, std::move(x)});
    total += out.pi.signals.back().prob;
  }
  for (auto& sig : out.pi.signals) sig.prob /= total;
  return out;
}

std::unique_ptr<PrincipalPolicy> adaptive_exploiter(const Instance& inst, std::size_t n_signals) {
  inst.validate();
  if (n_signals == 0) throw std::invalid_argument("adaptive exploiter: needs at least one signal");
  return std::make_unique<Adaptive>(inst, n_signals);
}

}  // namespace palab
