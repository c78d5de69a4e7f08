#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "palab/game.hpp"
#include "palab/rng.hpp"

namespace palab {

enum class FeedbackMode { Bandit, FullInfo };

const char* to_string(FeedbackMode m);
FeedbackMode parse_feedback_mode(const std::string& s);

// What the agent observes after acting: its own reward and, under full
// information, the reward of every action.
struct Feedback {
  double reward = 0.0;
  const Vec* all = nullptr;
};

struct RewardRange {
  double lo = 0.0;
  double hi = 1.0;

  // Maps r into [0, 1]; throws if r is outside the declared range.
  double scale(double r) const;
};

// Range of v over the instance's space and actions.
RewardRange agent_reward_range(const Instance& inst);

// Learner for a single context.
class SingleLearner {
 public:
  virtual ~SingleLearner() = default;
  virtual std::size_t choose() = 0;
  virtual Vec distribution() const = 0;
  virtual void feed(std::size_t action, const Feedback& fb) = 0;
  virtual FeedbackMode mode() const = 0;
  virtual std::size_t rounds() const = 0;
};

using SingleFactory = std::function<std::unique_ptr<SingleLearner>(std::size_t context)>;

class ContextualLearner {
 public:
  virtual ~ContextualLearner() = default;
  virtual std::size_t choose(std::size_t context) = 0;
  virtual void feed(std::size_t context, std::size_t action, const Feedback& fb) = 0;
  // The exact distribution the next choose(context) samples from.
  virtual Vec mixed_strategy(std::size_t context) const = 0;
  virtual FeedbackMode mode() const = 0;

  // Static agents respond to the committed strategy; learners ignore it.
  virtual bool privileged() const { return false; }
  virtual void observe_strategy(const PrincipalStrategy&) {}
};

// Exponential weights with anytime rates. Bandit mode is Exp3
// (eta_t = sqrt(ln n / (n t)), exploration gamma_t = min(1, sqrt(n ln n / t)),
// importance-weighted estimates); full-information mode is Hedge with
// eta_t = sqrt(ln n / t).
std::unique_ptr<SingleLearner> make_exp3(std::size_t n_arms, RewardRange range, std::uint64_t seed,
                                         FeedbackMode mode = FeedbackMode::Bandit);

// Blum-Mansour reduction over n internal exponential-weights learners.
std::unique_ptr<SingleLearner> make_swap_regret(std::size_t n_arms, RewardRange range, std::uint64_t seed,
                                                FeedbackMode mode);

enum class MeanBasedVariant { FtlThreshold, Mwu };

const char* to_string(MeanBasedVariant v);
MeanBasedVariant parse_mean_based_variant(const std::string& s);

// Tracks cumulative realized rewards sigma(a); needs full-information
// feedback. ftl_threshold plays argmax sigma with uniform ties; mwu plays
// exponential weights on sigma with eta = sqrt(ln n / horizon).
std::unique_ptr<SingleLearner> make_mean_based(std::size_t n_arms, MeanBasedVariant variant, std::uint64_t horizon,
                                               std::uint64_t seed);

// One mean-based copy per context. gamma must lie in (0, 1); it is recorded
// but does not change play.
std::unique_ptr<ContextualLearner> mean_based_learner(std::size_t n_contexts, std::size_t n_arms, double gamma,
                                                      MeanBasedVariant variant, std::uint64_t horizon,
                                                      std::uint64_t seed);

// Routes each context to its own copy of a single-context learner.
std::unique_ptr<ContextualLearner> per_context_wrapper(const SingleFactory& factory, std::size_t n_contexts);

// Stationary distribution p = p Q of a row-stochastic matrix: direct solve,
// then power iteration from uniform, then uniform.
Vec stationary_distribution(const std::vector<Vec>& Q);

enum class StaticKind { Quantal, InaccurateBelief, Adversarial, Favorable };

struct StaticParams {
  StaticKind kind = StaticKind::Quantal;
  double lambda = 1.0;   // quantal
  double epsilon = 0.0;  // inaccurate belief
  double delta = 0.0;    // adversarial / favorable
};

// Maps a committed strategy to the agent's response.
AgentStrategy static_agent(const Instance& inst, const PrincipalStrategy& pi, const StaticParams& params);

// The decision an inaccurate-belief agent acts on: eps/2 mass moved from the
// largest to the smallest coordinate, clipped.
Vec misperceive(const DecisionSpace& space, const Vec& x, double epsilon);

// A ContextualLearner that plays static_agent(inst, pi^t, params).
std::unique_ptr<ContextualLearner> make_static_learner(const Instance& inst, const StaticParams& params,
                                                       std::uint64_t seed);

// Ex-post regret accounting on expected rewards. Aggregates are kept per
// (context, played action, deviation) cell; individual rounds are kept only
// when requested.
class RegretLedger {
 public:
  RegretLedger(std::size_t n_contexts, std::size_t n_actions, bool keep_records = false);

  void record(std::size_t context, std::size_t action, const Vec& rewards);

  struct Record {
    std::size_t context;
    std::size_t action;
    Vec rewards;
  };
  const std::vector<Record>& records() const { return records_; }
  std::size_t rounds() const { return rounds_; }
  std::size_t n_contexts() const { return n_contexts_; }
  std::size_t n_actions() const { return n_actions_; }

  // cum(s, a, b): sum of rewards[b] over rounds with context s and action a.
  double cum(std::size_t s, std::size_t a, std::size_t b) const {
    return cum_[(s * n_actions_ + a) * n_actions_ + b];
  }

 private:
  std::size_t n_contexts_;
  std::size_t n_actions_;
  bool keep_;
  std::size_t rounds_ = 0;
  std::vector<double> cum_;
  std::vector<Record> records_;
};

struct RegretTotals {
  double creg = 0.0;
  double csreg = 0.0;
};

RegretTotals measure_regret(const RegretLedger& ledger);

// Per-context external regret, the terms of creg.
std::vector<double> per_context_regret(const RegretLedger& ledger);

}  // namespace palab
