#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "palab/instance.hpp"

namespace palab {

enum class Visibility { None, History, AgentMixedStrategy };

const char* to_string(Visibility v);

// What a policy may look at when choosing round t's strategy (t is 1-based).
struct PolicyView {
  std::size_t t = 1;
  // Agent's mixed strategy per signal, filled for AgentMixedStrategy policies.
  const std::vector<Vec>* agent_rho = nullptr;
};

class PrincipalPolicy {
 public:
  virtual ~PrincipalPolicy() = default;
  // The returned reference stays valid until the next call.
  virtual const PrincipalStrategy& next(const PolicyView& view) = 0;
  virtual Visibility visibility() const = 0;
  // Upper bound on the number of signals any round's strategy uses.
  virtual std::size_t n_signals() const = 0;
  virtual std::string name() const = 0;
};

std::unique_ptr<PrincipalPolicy> fixed_policy(const Instance& inst, PrincipalStrategy pi);

// Two-phase exploiter for the two-state, three-action mean-based game: state
// k is sent as signal k for t <= ceil(T/2), then the labels are swapped.
std::unique_ptr<PrincipalPolicy> mean_based_exploiter(const PersuasionInstance& p, std::optional<std::uint64_t> T);

struct AdaptiveResult {
  PrincipalStrategy pi;
  double value = 0.0;
};

// max over feasible pi with n_signals signals of U(pi, rho); signals the LP
// leaves empty keep probability 0 at the space's center.
AdaptiveResult best_strategy_against(const Instance& inst, const std::vector<Vec>& rho, std::size_t n_signals);

std::unique_ptr<PrincipalPolicy> adaptive_exploiter(const Instance& inst, std::size_t n_signals);

}  // namespace palab
