#pragma once

#include <optional>
#include <string>
#include <vector>

#include "palab/linalg.hpp"
#include "palab/space.hpp"

namespace palab {

// Which reduction produced an instance; the family bounds need the
// family-specific constants (prior minimum, reward and payment caps).
struct FamilyInfo {
  std::string family = "generic";  // generic | persuasion | stackelberg | contract_box | contract_expected
  double p0 = 0.0;
  double R = 0.0;
  double P = 0.0;
};

struct Instance {
  DecisionSpace space = DecisionSpace::simplex(1);
  std::vector<std::string> actions;
  std::size_t n_signals = 0;
  Matrix u_lin;  // d x |A|
  Vec u_off;     // |A|
  Matrix v_lin;
  Vec v_off;
  std::optional<Vec> mean;  // MeanEquals(c0) when set
  FamilyInfo family;

  std::size_t dim() const { return space.dim(); }
  std::size_t n_actions() const { return actions.size(); }

  double u(std::span<const double> x, std::size_t a) const;
  double v(std::span<const double> x, std::size_t a) const;
  Vec v_all(std::span<const double> x) const;
  Vec u_all(std::span<const double> x) const;

  // Throws std::invalid_argument / DimensionError describing the first
  // violated invariant.
  void validate() const;
};

struct PersuasionInstance {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  Vec prior;
  Matrix sender_u;    // |states| x |A|
  Matrix receiver_v;  // |states| x |A|
  std::size_t n_signals = 0;

  double p0() const;
  void validate() const;
  Instance to_generalized() const;
};

struct Signal {
  double prob = 0.0;
  Vec decision;

  friend bool operator==(const Signal&, const Signal&) = default;
};

struct PrincipalStrategy {
  std::vector<Signal> signals;

  std::size_t size() const { return signals.size(); }
  Vec mean() const;

  friend bool operator==(const PrincipalStrategy&, const PrincipalStrategy&) = default;
};

struct AgentStrategy {
  std::vector<Vec> rows;  // rows[s][a] = rho(a | s)

  static AgentStrategy pure(const std::vector<std::size_t>& actions, std::size_t n_actions);
  static AgentStrategy uniform(std::size_t n_signals, std::size_t n_actions);

  std::size_t size() const { return rows.size(); }
  bool deterministic(double tol = 1e-12) const;
  void validate(std::size_t n_actions, double tol = 1e-9) const;
};

// Checks probabilities, feasibility of decisions and, when the instance is
// constrained, the mean condition.
void validate_strategy(const Instance& inst, const PrincipalStrategy& pi, double prob_tol = 1e-9,
                       double mean_tol = 1e-8);

}  // namespace palab
