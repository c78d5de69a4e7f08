#pragma once

#include <optional>
#include <vector>

#include "palab/solvers.hpp"

namespace palab {

struct RobustSchemeParams {
  double theta = 0.0;
  double eta = 0.0;
  std::optional<Vec> z;  // boundary point restoring the mean, if one was needed
  double epsilon = 0.0;
};

struct RobustScheme {
  PrincipalStrategy pi;
  std::vector<std::size_t> intended;  // intended action of each original signal
  RobustSchemeParams params;
  bool expanded = false;              // an extra signal beyond n_signals was added
};

// Shifts every decision toward the anchor of its intended action so that the
// intended action is the unique delta-optimal one, then restores the mean
// with one boundary signal. epsilon <= 0 selects 1e-3 * G.
RobustScheme build_robust_scheme(const Instance& inst, const InstanceAnalysis& an, const PrincipalStrategy& pi_opt,
                                 const AgentStrategy& rho_opt, double delta, double epsilon = 0.0);

struct EmbeddedSignal {
  std::size_t source_signal = 0;
  std::size_t action = 0;
  bool correction = false;  // the mean-restoring boundary signal
};

struct Embedding {
  PrincipalStrategy pi;
  AgentStrategy rho;
  std::vector<EmbeddedSignal> labels;
  double eta = 0.0;
  double delta = 0.0;  // agent loss of the input rho, V(pi, BR) - V(pi, rho)
};

// Splits each signal by recommended action and moves each piece just far
// enough toward the action's anchor that the action becomes exactly optimal.
Embedding embed_exact_br(const Instance& inst, const InstanceAnalysis& an, const PrincipalStrategy& pi,
                         const AgentStrategy& rho);

struct FilterResult {
  AgentStrategy rho;
  std::vector<char> replaced;  // rows that had no mass on Delta-optimal actions
};

// Renormalizes each row of rho onto the Delta-optimal actions at x_s.
FilterResult filter_to_delta_optimal(const Instance& inst, const PrincipalStrategy& pi, const AgentStrategy& rho,
                                     double Delta);

// The constant K with over / under deviations K * delta / G: diam L, plus
// 2 B diam / dist when constrained.
double perturbation_constant(const InstanceAnalysis& an);

// Margin at which a robust scheme also guards against randomized
// delta-responses: sqrt(2 B delta G / K) balances the construction's loss
// K Delta / G against the filtering loss 2 B delta / Delta. Never below delta,
// capped at G / 2.
double randomized_design_delta(const InstanceAnalysis& an, double delta);

}  // namespace palab
