#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "palab/game.hpp"
#include "palab/instance.hpp"
#include "palab/lp.hpp"

namespace palab {

struct StackelbergResult {
  double value = 0.0;
  PrincipalStrategy pi;
  AgentStrategy rho;
};

// Optimal principal utility against an exactly best-responding agent that
// breaks ties in the principal's favour.
StackelbergResult stackelberg_value(const Instance& inst);

struct GapResult {
  double G = 0.0;
  std::vector<Vec> anchors;  // anchors[a] makes a optimal by margin G
};

// G <= 0 means some action is weakly dominated; it is returned, not raised.
// A single-action instance has G = +inf.
GapResult inducibility_gap(const Instance& inst);

struct InstanceAnalysis {
  double U_star = 0.0;
  StackelbergResult witness;
  double G = 0.0;
  std::vector<Vec> anchors;
  double B = 0.0;
  double L = 0.0;
  double diam = 0.0;
  Norm norm = Norm::L1;
  std::optional<double> dist;     // exact distance of the mean to the boundary
  std::optional<double> min_mean; // min_i c0_i, the prior minimum in persuasion
  FamilyInfo family;
  bool constrained = false;
};

InstanceAnalysis analyze(const Instance& inst);

struct InnerResult {
  AgentStrategy rho;
  double value = 0.0;
};

// min / max of U(pi, rho) over delta-best responses. randomized selects the
// in-expectation set (an LP); otherwise the per-signal set.
InnerResult worst_case_delta_br(const Instance& inst, const PrincipalStrategy& pi, double delta, bool randomized);
InnerResult best_case_delta_br(const Instance& inst, const PrincipalStrategy& pi, double delta, bool randomized);

enum class Objective { UnderD, UnderR, OverD, OverR };
const char* to_string(Objective o);
Objective parse_objective(const std::string& s);

struct SearchBudget {
  std::size_t grid = 200;      // grid cells per unit for two-state constrained instances
  std::size_t samples = 200;   // random decompositions otherwise
  std::size_t refine = 60;     // local refinement sweeps per objective
  std::uint64_t seed = 1;
};

struct ObjectiveValue {
  Objective which = Objective::UnderD;
  double value = 0.0;  // a certified lower bound on the sup/max
  PrincipalStrategy pi;
  AgentStrategy rho;
};

struct ObjectiveSet {
  double delta = 0.0;
  double U_star = 0.0;
  ObjectiveValue under_r, under_d, over_d, over_r;
  std::size_t candidates = 0;
  std::string method;  // "grid" or "random+refine"

  const ObjectiveValue& get(Objective o) const;
};

// All four objectives searched over one shared candidate set, so the chain
// under_r <= under_d <= U* <= over_d <= over_r holds exactly.
ObjectiveSet search_objectives(const Instance& inst, double delta, const SearchBudget& budget);
ObjectiveValue obj_outer_search(const Instance& inst, double delta, Objective which, const SearchBudget& budget);

struct Example51Analytic {
  double under_R_upper;
  double over_R_lower;
  double U_star;
};

Example51Analytic example51_analytic(double mu0, double delta);

struct Bound {
  std::string name;
  double value = 0.0;
  bool applicable = false;
  std::string note;
};

struct BoundSet {
  double delta = 0.0;
  std::vector<Bound> bounds;

  const Bound* find(const std::string& name) const;
  const Bound& at(const std::string& name) const;
};

BoundSet theorem_bounds(const InstanceAnalysis& analysis, double delta);

// Filtering: under^R(delta) >= under^D(Delta) - 2 B delta / Delta.
double filtering_bound(double under_d_at_Delta, double B, double delta, double Delta);

// Worker count for parallel sections: PALAB_WORKERS, else hardware threads.
std::size_t worker_count();

}  // namespace palab
