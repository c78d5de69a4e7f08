#include "palab/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace palab {

namespace {

void check_shapes(const Instance& inst, const PrincipalStrategy& pi, const AgentStrategy& rho) {
  if (rho.size() != pi.size()) throw DimensionError("signals", pi.size(), rho.size());
  for (std::size_t s = 0; s < pi.size(); ++s) {
    if (pi.signals[s].decision.size() != inst.dim())
      throw DimensionError("decision", inst.dim(), pi.signals[s].decision.size());
    if (rho.rows[s].size() != inst.n_actions())
      throw DimensionError("actions", inst.n_actions(), rho.rows[s].size());
  }
}

}  // namespace

double principal_utility(const Instance& inst, const PrincipalStrategy& pi, const AgentStrategy& rho) {
  check_shapes(inst, pi, rho);
  double total = 0.0;
  for (std::size_t s = 0; s < pi.size(); ++s) {
    const auto& x = pi.signals[s].decision;
    double inner = 0.0;
    for (std::size_t a = 0; a < inst.n_actions(); ++a)
      if (rho.rows[s][a] != 0.0) inner += rho.rows[s][a] * inst.u(x, a);
    total += pi.signals[s].prob * inner;
  }
  return total;
}

double agent_utility(const Instance& inst, const PrincipalStrategy& pi, const AgentStrategy& rho) {
  check_shapes(inst, pi, rho);
  double total = 0.0;
  for (std::size_t s = 0; s < pi.size(); ++s) {
    const auto& x = pi.signals[s].decision;
    double inner = 0.0;
    for (std::size_t a = 0; a < inst.n_actions(); ++a)
      if (rho.rows[s][a] != 0.0) inner += rho.rows[s][a] * inst.v(x, a);
    total += pi.signals[s].prob * inner;
  }
  return total;
}

std::vector<std::size_t> best_response_set(const Instance& inst, std::span<const double> x, double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
  if (!inst.space.contains(x)) throw std::invalid_argument("best_response_set: decision is infeasible");
  Vec vals = inst.v_all(x);
  double best = *std::max_element(vals.begin(), vals.end());
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < vals.size(); ++a)
    if (vals[a] >= best - delta - 1e-12) out.push_back(a);
  return out;
}

namespace {

AgentStrategy tie_broken_best_response(const Instance& inst, const PrincipalStrategy& pi, bool favorable) {
  std::vector<std::size_t> picks;
  for (const auto& sig : pi.signals) {
    auto br = best_response_set(inst, sig.decision, 0.0);
    std::size_t pick = br.front();
    double best_u = inst.u(sig.decision, pick);
    for (std::size_t a : br) {
      double ua = inst.u(sig.decision, a);
      if (favorable ? ua > best_u : ua < best_u) {
        best_u = ua;
        pick = a;
      }
    }
    picks.push_back(pick);
  }
  return AgentStrategy::pure(picks, inst.n_actions());
}

}  // namespace

AgentStrategy favorable_best_response(const Instance& inst, const PrincipalStrategy& pi) {
  return tie_broken_best_response(inst, pi, true);
}

AgentStrategy adversarial_best_response(const Instance& inst, const PrincipalStrategy& pi) {
  return tie_broken_best_response(inst, pi, false);
}

double best_agent_value(const Instance& inst, const PrincipalStrategy& pi) {
  double total = 0.0;
  for (const auto& sig : pi.signals) {
    Vec vals = inst.v_all(sig.decision);
    total += sig.prob * *std::max_element(vals.begin(), vals.end());
  }
  return total;
}

std::vector<Vec> suboptimality(const Instance& inst, const PrincipalStrategy& pi) {
  std::vector<Vec> out;
  for (const auto& sig : pi.signals) {
    Vec vals = inst.v_all(sig.decision);
    double best = *std::max_element(vals.begin(), vals.end());
    for (double& v : vals) v = best - v;
    out.push_back(std::move(vals));
  }
  return out;
}

Decomposition scheme_to_decomposition(const PersuasionInstance& p, const Matrix& scheme) {
  const std::size_t k = p.states.size();
  if (scheme.rows() != k) throw DimensionError("scheme states", k, scheme.rows());
  for (std::size_t w = 0; w < k; ++w) {
    auto row = scheme.row(w);
    for (double q : row)
      if (q < -1e-12) throw std::invalid_argument("scheme has a negative entry");
    if (std::abs(sum(row) - 1.0) > 1e-9) throw std::invalid_argument("scheme row does not sum to 1");
  }
  Decomposition out;
  for (std::size_t s = 0; s < scheme.cols(); ++s) {
    double ps = 0.0;
    for (std::size_t w = 0; w < k; ++w) ps += p.prior[w] * scheme(w, s);
    if (ps < 1e-12) continue;
    Vec post(k);
    for (std::size_t w = 0; w < k; ++w) post[w] = p.prior[w] * scheme(w, s) / ps;
    out.strategy.signals.push_back({ps, std::move(post)});
    out.signal_ids.push_back(s);
  }
  return out;
}

Matrix decomposition_to_scheme(const PersuasionInstance& p, const PrincipalStrategy& pi) {
  const std::size_t k = p.states.size();
  for (const auto& sig : pi.signals)
    if (sig.decision.size() != k) throw DimensionError("posterior", k, sig.decision.size());
  Vec m = pi.mean();
  if (max_abs_diff(m, p.prior) > 1e-6)
    throw std::invalid_argument("decomposition violates Bayes plausibility (posterior mean != prior)");
  Matrix scheme(k, pi.size(), 0.0);
  for (std::size_t w = 0; w < k; ++w) {
    if (p.prior[w] <= 0.0) {
      scheme(w, 0) = 1.0;
      continue;
    }
    double row_sum = 0.0;
    for (std::size_t s = 0; s < pi.size(); ++s) {
      scheme(w, s) = std::max(0.0, pi.signals[s].prob * pi.signals[s].decision[w] / p.prior[w]);
      row_sum += scheme(w, s);
    }
    for (std::size_t s = 0; s < pi.size(); ++s) scheme(w, s) /= row_sum;
  }
  return scheme;
}

}  // namespace palab
