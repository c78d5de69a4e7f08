#include "palab/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "palab/solvers.hpp"

namespace palab {

const char* to_string(FeedbackMode m) { return m == FeedbackMode::Bandit ? "bandit" : "full_info"; }

FeedbackMode parse_feedback_mode(const std::string& s) {
  if (s == "bandit") return FeedbackMode::Bandit;
  if (s == "full_info") return FeedbackMode::FullInfo;
  throw std::invalid_argument("unknown feedback mode '" + s + "' (expected bandit or full_info)");
}

const char* to_string(MeanBasedVariant v) { return v == MeanBasedVariant::FtlThreshold ? "ftl_threshold" : "mwu"; }

MeanBasedVariant parse_mean_based_variant(const std::string& s) {
  if (s == "ftl_threshold") return MeanBasedVariant::FtlThreshold;
  if (s == "mwu") return MeanBasedVariant::Mwu;
  throw std::invalid_argument("unknown mean-based variant '" + s + "' (expected ftl_threshold or mwu)");
}

double RewardRange::scale(double r) const {
  const double tol = 1e-9 * (1.0 + std::abs(lo) + std::abs(hi));
  if (!(r >= lo - tol && r <= hi + tol))
    throw std::out_of_range("reward " + std::to_string(r) + " outside declared range [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
  if (hi <= lo) return 0.5;
  return std::clamp((r - lo) / (hi - lo), 0.0, 1.0);
}

RewardRange agent_reward_range(const Instance& inst) {
  RewardRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t a = 0; a < inst.n_actions(); ++a) {
    const Vec col = inst.v_lin.column(a);
    r.lo = std::min(r.lo, inst.space.min_affine(col, inst.v_off[a]));
    r.hi = std::max(r.hi, inst.space.max_affine(col, inst.v_off[a]));
  }
  return r;
}

namespace {

// Numerically stable softmax of eta * s.
Vec softmax(const Vec& s, double eta) {
  Vec p(s.size());
  const double m = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) z += p[i] = std::exp(eta * (s[i] - m));
  for (double& x : p) x /= z;
  return p;
}

double log_n(std::size_t n) { return std::log(static_cast<double>(n)); }

// Exponential weights over n arms with anytime rates.
struct ExpWeights {
  Vec score;
  std::size_t t = 0;  // rounds already fed
  bool bandit_rate;

  ExpWeights(std::size_t n, bool bandit) : score(n, 0.0), bandit_rate(bandit) {}

  double eta() const {
    const double n = static_cast<double>(score.size());
    const double next = static_cast<double>(t + 1);
    return bandit_rate ? std::sqrt(log_n(score.size()) / (n * next)) : std::sqrt(log_n(score.size()) / next);
  }
  Vec weights() const { return softmax(score, eta()); }
  void add(const Vec& r) {
    for (std::size_t i = 0; i < score.size(); ++i) score[i] += r[i];
    ++t;
  }
};

double exploration(std::size_t n, std::size_t t_next) {
  if (n <= 1) return 0.0;
  return std::min(1.0, std::sqrt(static_cast<double>(n) * log_n(n) / static_cast<double>(t_next)));
}

Vec mix_uniform(Vec p, double gamma) {
  const double u = gamma / static_cast<double>(p.size());
  for (double& x : p) x = (1.0 - gamma) * x + u;
  return p;
}

void check_arm(std::size_t a, std::size_t n) {
  if (a >= n) throw std::out_of_range("action " + std::to_string(a) + " out of range for " + std::to_string(n) + " arms");
}

const Vec& full_vector(const Feedback& fb, std::size_t n) {
  if (!fb.all) throw std::invalid_argument("full-information learner fed without a reward vector");
  if (fb.all->size() != n) throw DimensionError("actions", n, fb.all->size());
  return *fb.all;
}

class Exp3 final : public SingleLearner {
 public:
  Exp3(std::size_t n, RewardRange range, std::uint64_t seed, FeedbackMode mode)
      : w_(n, mode == FeedbackMode::Bandit), range_(range), rng_(seed, 0, 0), mode_(mode) {
    if (n == 0) throw std::invalid_argument("exp3: n_arms must be >= 1");
  }

  Vec distribution() const override {
    Vec p = w_.weights();
    if (mode_ == FeedbackMode::Bandit) p = mix_uniform(std::move(p), exploration(p.size(), w_.t + 1));
    return p;
  }

  std::size_t choose() override {
    if (w_.score.size() == 1) return 0;
    return rng_.categorical(distribution());
  }

  void feed(std::size_t a, const Feedback& fb) override {
    const std::size_t n = w_.score.size();
    check_arm(a, n);
    Vec est(n, 0.0);
    if (mode_ == FeedbackMode::Bandit) {
      const double r = range_.scale(fb.reward);
      est[a] = r / distribution()[a];
    } else {
      const Vec& all = full_vector(fb, n);
      for (std::size_t i = 0; i < n; ++i) est[i] = range_.scale(all[i]);
    }
    w_.add(est);
  }

  FeedbackMode mode() const override { return mode_; }
  std::size_t rounds() const override { return w_.t; }

 private:
  ExpWeights w_;
  RewardRange range_;
  CounterRng rng_;
  FeedbackMode mode_;
};

class SwapRegret final : public SingleLearner {
 public:
  SwapRegret(std::size_t n, RewardRange range, std::uint64_t seed, FeedbackMode mode)
      : range_(range), rng_(seed, 0, 0), mode_(mode) {
    if (n == 0) throw std::invalid_argument("swap_regret_learner: n_arms must be >= 1");
    for (std::size_t i = 0; i < n; ++i) internal_.emplace_back(n, mode == FeedbackMode::Bandit);
  }

  Vec stationary() const {
    std::vector<Vec> Q;
    Q.reserve(internal_.size());
    for (const auto& w : internal_) Q.push_back(w.weights());
    return stationary_distribution(Q);
  }

  Vec distribution() const override {
    Vec p = stationary();
    if (mode_ == FeedbackMode::Bandit) p = mix_uniform(std::move(p), exploration(p.size(), t_ + 1));
    return p;
  }

  std::size_t choose() override {
    if (internal_.size() == 1) return 0;
    return rng_.categorical(distribution());
  }

  void feed(std::size_t a, const Feedback& fb) override {
    const std::size_t n = internal_.size();
    check_arm(a, n);
    const Vec p = stationary();
    Vec est(n, 0.0);
    if (mode_ == FeedbackMode::Bandit) {
      const double gamma = exploration(n, t_ + 1);
      est[a] = range_.scale(fb.reward) / mix_uniform(p, gamma)[a];
    } else {
      const Vec& all = full_vector(fb, n);
      for (std::size_t i = 0; i < n; ++i) est[i] = range_.scale(all[i]);
    }
    Vec share(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) share[j] = p[i] * est[j];
      internal_[i].add(share);
    }
    ++t_;
  }

  FeedbackMode mode() const override { return mode_; }
  std::size_t rounds() const override { return t_; }

 private:
  std::vector<ExpWeights> internal_;
  RewardRange range_;
  CounterRng rng_;
  FeedbackMode mode_;
  std::size_t t_ = 0;
};

class MeanBased final : public SingleLearner {
 public:
  MeanBased(std::size_t n, MeanBasedVariant variant, std::uint64_t horizon, std::uint64_t seed)
      : sigma_(n, 0.0), variant_(variant), rng_(seed, 0, 0) {
    if (n == 0) throw std::invalid_argument("mean_based_learner: n_arms must be >= 1");
    if (variant == MeanBasedVariant::Mwu) {
      if (horizon == 0) throw std::invalid_argument("mean_based_learner: mwu needs a horizon");
      eta_ = std::sqrt(log_n(n) / static_cast<double>(horizon));
    }
  }

  Vec distribution() const override {
    if (variant_ == MeanBasedVariant::Mwu) return softmax(sigma_, eta_);
    const auto lead = leaders();
    Vec p(sigma_.size(), 0.0);
    for (std::size_t a : lead) p[a] = 1.0 / static_cast<double>(lead.size());
    return p;
  }

  std::size_t choose() override {
    if (variant_ == MeanBasedVariant::Mwu) return rng_.categorical(distribution());
    const auto lead = leaders();
    if (lead.size() == 1) return lead[0];
    return lead[static_cast<std::size_t>(rng_.uniform() * static_cast<double>(lead.size()))];
  }

  void feed(std::size_t a, const Feedback& fb) override {
    check_arm(a, sigma_.size());
    if (!fb.all) throw std::invalid_argument("mean_based_learner: bandit feedback cannot form cumulative sums");
    const Vec& all = full_vector(fb, sigma_.size());
    for (std::size_t i = 0; i < sigma_.size(); ++i) sigma_[i] += all[i];
    ++t_;
  }

  FeedbackMode mode() const override { return FeedbackMode::FullInfo; }
  std::size_t rounds() const override { return t_; }

 private:
  std::vector<std::size_t> leaders() const {
    const double m = *std::max_element(sigma_.begin(), sigma_.end());
    const double tol = 1e-12 * (1.0 + std::abs(m));
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < sigma_.size(); ++a)
      if (sigma_[a] >= m - tol) out.push_back(a);
    return out;
  }

  Vec sigma_;
  MeanBasedVariant variant_;
  double eta_ = 0.0;
  CounterRng rng_;
  std::size_t t_ = 0;
};

class PerContext final : public ContextualLearner {
 public:
  PerContext(const SingleFactory& factory, std::size_t n_contexts) {
    if (n_contexts == 0) throw std::invalid_argument("per_context_wrapper: needs at least one context");
    for (std::size_t s = 0; s < n_contexts; ++s) copies_.push_back(factory(s));
    mode_ = copies_[0]->mode();
  }

  std::size_t choose(std::size_t s) override { return at(s).choose(); }
  void feed(std::size_t s, std::size_t a, const Feedback& fb) override { at(s).feed(a, fb); }
  Vec mixed_strategy(std::size_t s) const override { return at(s).distribution(); }
  FeedbackMode mode() const override { return mode_; }

 private:
  SingleLearner& at(std::size_t s) const {
    if (s >= copies_.size())
      throw std::out_of_range("unknown context " + std::to_string(s) + " (have " + std::to_string(copies_.size()) + ")");
    return *copies_[s];
  }

  std::vector<std::unique_ptr<SingleLearner>> copies_;
  FeedbackMode mode_;
};

class StaticLearner final : public ContextualLearner {
 public:
  StaticLearner(const Instance& inst, const StaticParams& params, std::uint64_t seed)
      : inst_(inst), params_(params), rng_(seed, 0, 0) {
    static_agent(inst_, PrincipalStrategy{{{1.0, inst_.space.center()}}}, params_);  // validates params
  }

  bool privileged() const override { return true; }

  void observe_strategy(const PrincipalStrategy& pi) override {
    if (have_ && same(pi)) return;
    rho_ = static_agent(inst_, pi, params_);
    seen_ = pi;
    have_ = true;
  }

  std::size_t choose(std::size_t s) override { return rng_.categorical(row(s)); }
  void feed(std::size_t s, std::size_t a, const Feedback&) override {
    row(s);
    check_arm(a, inst_.n_actions());
  }
  Vec mixed_strategy(std::size_t s) const override { return row(s); }
  FeedbackMode mode() const override { return FeedbackMode::Bandit; }

 private:
  const Vec& row(std::size_t s) const {
    if (!have_) throw std::logic_error("static agent used before observing the principal's strategy");
    if (s >= rho_.size()) throw std::out_of_range("unknown context " + std::to_string(s));
    return rho_.rows[s];
  }
  bool same(const PrincipalStrategy& pi) const {
    if (pi.size() != seen_.size()) return false;
    for (std::size_t s = 0; s < pi.size(); ++s)
      if (pi.signals[s].prob != seen_.signals[s].prob || pi.signals[s].decision != seen_.signals[s].decision)
        return false;
    return true;
  }

  Instance inst_;
  StaticParams params_;
  CounterRng rng_;
  AgentStrategy rho_;
  PrincipalStrategy seen_;
  bool have_ = false;
};

}  // namespace

std::unique_ptr<SingleLearner> make_exp3(std::size_t n_arms, RewardRange range, std::uint64_t seed, FeedbackMode mode) {
  return std::make_unique<Exp3>(n_arms, range, seed, mode);
}

std::unique_ptr<SingleLearner> make_swap_regret(std::size_t n_arms, RewardRange range, std::uint64_t seed,
                                                FeedbackMode mode) {
  return std::make_unique<SwapRegret>(n_arms, range, seed, mode);
}

std::unique_ptr<SingleLearner> make_mean_based(std::size_t n_arms, MeanBasedVariant variant, std::uint64_t horizon,
                                               std::uint64_t seed) {
  return std::make_unique<MeanBased>(n_arms, variant, horizon, seed);
}

std::unique_ptr<ContextualLearner> per_context_wrapper(const SingleFactory& factory, std::size_t n_contexts) {
  return std::make_unique<PerContext>(factory, n_contexts);
}

std::unique_ptr<ContextualLearner> mean_based_learner(std::size_t n_contexts, std::size_t n_arms, double gamma,
                                                      MeanBasedVariant variant, std::uint64_t horizon,
                                                      std::uint64_t seed) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("mean_based_learner: gamma must lie in (0, 1)");
  return per_context_wrapper(
      [&](std::size_t s) { return make_mean_based(n_arms, variant, horizon, hash_key(seed, s)); }, n_contexts);
}

Vec stationary_distribution(const std::vector<Vec>& Q) {
  const std::size_t n = Q.size();
  if (n == 0) throw std::invalid_argument("stationary_distribution: empty matrix");
  for (const auto& row : Q)
    if (row.size() != n) throw DimensionError("columns", n, row.size());
  if (n == 1) return {1.0};

  // Direct solve of p (Q - I) = 0 with the last equation replaced by sum p = 1.
  std::vector<Vec> A(n, Vec(n + 1, 0.0));
  for (std::size_t j = 0; j + 1 < n; ++j)
    for (std::size_t i = 0; i < n; ++i) A[j][i] = Q[i][j] - (i == j ? 1.0 : 0.0);
  for (std::size_t i = 0; i < n; ++i) A[n - 1][i] = 1.0;
  A[n - 1][n] = 1.0;
  bool ok = true;
  for (std::size_t c = 0; c < n && ok; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    if (std::abs(A[piv][c]) < 1e-12) {
      ok = false;
      break;
    }
    std::swap(A[c], A[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || A[r][c] == 0.0) continue;
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k <= n; ++k) A[r][k] -= f * A[c][k];
    }
  }
  if (ok) {
    Vec p(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = A[i][n] / A[i][i];
      if (!(p[i] >= -1e-9)) ok = false;
      p[i] = std::max(p[i], 0.0);
      total += p[i];
    }
    if (ok && total > 0.0) {
      for (double& x : p) x /= total;
      return p;
    }
  }

  Vec p(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < 100000; ++it) {
    Vec next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) next[j] += p[i] * Q[i][j];
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) diff += std::abs(next[j] - p[j]);
    p = std::move(next);
    if (diff < 1e-12) return p;
  }
  return Vec(n, 1.0 / static_cast<double>(n));
}

Vec misperceive(const DecisionSpace& space, const Vec& x, double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("inaccurate_belief: epsilon must be >= 0");
  if (x.size() < 2 || epsilon == 0.0) return x;
  const std::size_t hi = static_cast<std::size_t>(std::max_element(x.begin(), x.end()) - x.begin());
  std::size_t lo = hi == 0 ? 1 : 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (i != hi && x[i] < x[lo]) lo = i;
  Vec out = x;
  double m = epsilon / 2.0;
  m = std::min(m, x[hi] - space.lo()[hi]);
  m = std::min(m, space.hi()[lo] - x[lo]);
  m = std::max(m, 0.0);
  out[hi] -= m;
  out[lo] += m;
  return out;
}

AgentStrategy static_agent(const Instance& inst, const PrincipalStrategy& pi, const StaticParams& params) {
  switch (params.kind) {
    case StaticKind::Quantal: {
      if (!(params.lambda > 0.0)) throw std::invalid_argument("quantal: lambda must be > 0");
      AgentStrategy rho;
      for (const auto& sig : pi.signals) {
        Vec vals(inst.n_actions());
        for (std::size_t a = 0; a < vals.size(); ++a) vals[a] = inst.v(sig.decision, a);
        rho.rows.push_back(softmax(vals, params.lambda));
      }
      return rho;
    }
    case StaticKind::InaccurateBelief: {
      if (!(params.epsilon >= 0.0)) throw std::invalid_argument("inaccurate_belief: epsilon must be >= 0");
      PrincipalStrategy seen = pi;
      for (auto& sig : seen.signals) sig.decision = misperceive(inst.space, sig.decision, params.epsilon);
      return favorable_best_response(inst, seen);
    }
    case StaticKind::Adversarial:
      if (!(params.delta >= 0.0)) throw std::invalid_argument("adversarial agent: delta must be >= 0");
      return worst_case_delta_br(inst, pi, params.delta, true).rho;
    case StaticKind::Favorable:
      if (!(params.delta >= 0.0)) throw std::invalid_argument("favorable agent: delta must be >= 0");
      return best_case_delta_br(inst, pi, params.delta, true).rho;
  }
  throw std::logic_error("static_agent: unknown kind");
}

std::unique_ptr<ContextualLearner> make_static_learner(const Instance& inst, const StaticParams& params,
                                                       std::uint64_t seed) {
  return std::make_unique<StaticLearner>(inst, params, seed);
}

RegretLedger::RegretLedger(std::size_t n_contexts, std::size_t n_actions, bool keep_records)
    : n_contexts_(n_contexts), n_actions_(n_actions), keep_(keep_records),
      cum_(n_contexts * n_actions * n_actions, 0.0) {
  if (n_contexts == 0 || n_actions == 0) throw std::invalid_argument("RegretLedger: empty context or action set");
}

void RegretLedger::record(std::size_t context, std::size_t action, const Vec& rewards) {
  if (rewards.empty()) throw std::invalid_argument("RegretLedger: round without a reward vector");
  if (rewards.size() != n_actions_) throw DimensionError("actions", n_actions_, rewards.size());
  if (context >= n_contexts_) throw std::out_of_range("RegretLedger: unknown context " + std::to_string(context));
  if (action >= n_actions_) throw std::out_of_range("RegretLedger: unknown action " + std::to_string(action));
  double* cell = &cum_[(context * n_actions_ + action) * n_actions_];
  for (std::size_t b = 0; b < n_actions_; ++b) cell[b] += rewards[b];
  ++rounds_;
  if (keep_) records_.push_back({context, action, rewards});
}

std::vector<double> per_context_regret(const RegretLedger& L) {
  const std::size_t n = L.n_actions();
  std::vector<double> out(L.n_contexts(), 0.0);
  for (std::size_t s = 0; s < L.n_contexts(); ++s) {
    double played = 0.0;
    for (std::size_t a = 0; a < n; ++a) played += L.cum(s, a, a);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < n; ++b) {
      double dev = 0.0;
      for (std::size_t a = 0; a < n; ++a) dev += L.cum(s, a, b);
      best = std::max(best, dev);
    }
    out[s] = std::max(0.0, best - played);
  }
  return out;
}

RegretTotals measure_regret(const RegretLedger& L) {
  RegretTotals t;
  for (double r : per_context_regret(L)) t.creg += r;
  const std::size_t n = L.n_actions();
  for (std::size_t s = 0; s < L.n_contexts(); ++s)
    for (std::size_t a = 0; a < n; ++a) {
      double best = 0.0;
      for (std::size_t b = 0; b < n; ++b) best = std::max(best, L.cum(s, a, b) - L.cum(s, a, a));
      t.csreg += best;
    }
  return t;
}

}  // namespace palab
