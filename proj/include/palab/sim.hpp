#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "palab/learners.hpp"
#include "palab/presets.hpp"
#include "palab/principals.hpp"
#include "palab/solvers.hpp"

namespace palab {

enum class SimMode { Generalized, Persuasion };

const char* to_string(SimMode m);
SimMode parse_sim_mode(const std::string& s);

struct PolicyConfig {
  // fixed | stackelberg | no_info | robust_fixed | mean_exploiter | adaptive
  std::string kind = "stackelberg";
  std::optional<PrincipalStrategy> strategy;  // fixed
  // robust_fixed: the scheme's delta. Unset means pilot runs estimate it as
  // creg / T, first against the Stackelberg scheme, then against the robust
  // scheme itself until the estimate stops growing.
  std::optional<double> delta;
  double epsilon = 0.0;  // robust_fixed; 0 picks the default
  // robust_fixed: "randomized" builds the scheme at randomized_design_delta,
  // "deterministic" at delta itself.
  std::string target = "randomized";
};

struct LearnerConfig {
  // exp3 | hedge | swap_regret | mean_based | best_response | quantal |
  // inaccurate_belief | adversarial | favorable
  std::string kind = "exp3";
  FeedbackMode feedback = FeedbackMode::Bandit;
  double lambda = 1.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double gamma = 0.01;
  MeanBasedVariant variant = MeanBasedVariant::FtlThreshold;
  std::uint64_t seed = 0;
};

struct SimConfig {
  AnyInstance instance;
  // The game the principal plans with when it differs from the true one;
  // must share the decision space and mean.
  std::optional<AnyInstance> planning;
  PolicyConfig policy;
  LearnerConfig learner;
  std::uint64_t T = 1000;
  std::uint64_t seed = 1;
  SimMode mode = SimMode::Generalized;
  std::size_t replicas = 1;
  bool keep_rounds = false;

  const AnyInstance& planned() const { return planning ? *planning : instance; }
  void validate() const;
};

struct RoundRecord {
  std::uint64_t t = 0;
  std::size_t s = 0;
  int omega = -1;           // realized state, persuasion mode only
  std::size_t x_index = 0;  // which distinct strategy of the run was committed
  std::size_t a = 0;
  double u = 0.0;  // realized in persuasion mode, expected otherwise
  double v = 0.0;
  Vec r;  // expected agent reward of every action at the signal's decision
};

struct RunSummary {
  std::size_t replica = 0;
  std::uint64_t T = 0;
  double avg_u = 0.0;           // mean of logged u
  double avg_u_expected = 0.0;  // mean of u(x_s, a)
  double avg_v = 0.0;
  double creg = 0.0;
  double csreg = 0.0;
  double creg_realized = 0.0;  // persuasion mode: regret on realized rewards
  double csreg_realized = 0.0;
  std::vector<double> creg_per_context;
  std::size_t distinct_strategies = 0;
  std::optional<double> robust_delta;
};

struct RunLog {
  std::vector<RoundRecord> rounds;  // empty unless keep_rounds
  std::vector<PrincipalStrategy> strategies;
  RegretLedger ledger{1, 1};
  RunSummary summary;
};

// Fills in a pilot-estimated delta for robust_fixed policies. Idempotent.
SimConfig resolve(const SimConfig& config);

RunLog run(const SimConfig& config, std::size_t replica = 0);

struct Stats {
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;  // mean -/+ 1.96 se
  double ci_hi = 0.0;
};

Stats describe(const std::vector<double>& xs);

struct ReplicaSummary {
  std::vector<RunSummary> runs;
  std::vector<RunLog> logs;  // only when keep_rounds
  Stats avg_u;
  Stats creg;
  Stats csreg;
};

// Replicas run in parallel and reduce in index order, so the result does not
// depend on the worker count.
ReplicaSummary run_replicas(const SimConfig& config, std::size_t workers = 0);

void write_csv(std::ostream& os, const RunLog& log, std::size_t n_actions);

enum class Check { LowerBound, UpperBound };

const char* to_string(Check c);
Check parse_check(const std::string& s);

struct BoundInputs {
  double avg_u = 0.0;
  double se = 0.0;  // standard error of avg_u; 0 for a single run
  double creg = 0.0;
  double csreg = 0.0;
  std::uint64_t T = 1;
  double se_mult = 3.0;
};

struct BoundReport {
  Check check = Check::LowerBound;
  std::string bound_name;
  bool applicable = false;
  bool pass = false;
  double delta = 0.0;    // creg / T or csreg / T
  double lhs = 0.0;      // measured average utility
  double rhs = 0.0;      // bound at the measured delta
  double margin = 0.0;   // signed slack, positive when passing
  std::string note;
};

// LowerBound: avg_u >= under_r(creg / T) - se_mult se.
// UpperBound: avg_u <= over(csreg / T) + se_mult se.
BoundReport bound_check(const BoundInputs& in, const InstanceAnalysis& an, Check check);

BoundInputs bound_inputs(const ReplicaSummary& rs);

}  // namespace palab
