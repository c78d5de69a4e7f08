#pragma once

#include <vector>

#include "palab/instance.hpp"

namespace palab {

double principal_utility(const Instance& inst, const PrincipalStrategy& pi, const AgentStrategy& rho);
double agent_utility(const Instance& inst, const PrincipalStrategy& pi, const AgentStrategy& rho);

// {a : v(x,a) >= max v(x,.) - delta}, comparison tolerance 1e-12. Ties are
// returned as sets.
std::vector<std::size_t> best_response_set(const Instance& inst, std::span<const double> x, double delta);

// Exact best response per signal, ties broken in favour of (or against) the
// principal.
AgentStrategy favorable_best_response(const Instance& inst, const PrincipalStrategy& pi);
AgentStrategy adversarial_best_response(const Instance& inst, const PrincipalStrategy& pi);

// max_rho V(pi, rho).
double best_agent_value(const Instance& inst, const PrincipalStrategy& pi);

// Per signal: max_a' v(x_s,a') - v(x_s,a) for every a.
std::vector<Vec> suboptimality(const Instance& inst, const PrincipalStrategy& pi);

struct Decomposition {
  PrincipalStrategy strategy;
  std::vector<std::size_t> signal_ids;  // column of the scheme each signal came from
};

// scheme is |states| x |S|, row-stochastic: scheme(w, s) = P(s | w).
Decomposition scheme_to_decomposition(const PersuasionInstance& p, const Matrix& scheme);
Matrix decomposition_to_scheme(const PersuasionInstance& p, const PrincipalStrategy& pi);

}  // namespace palab
