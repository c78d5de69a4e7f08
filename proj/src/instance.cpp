#include "palab/instance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace palab {

double Instance::u(std::span<const double> x, std::size_t a) const {
  if (x.size() != dim()) throw DimensionError("decision", dim(), x.size());
  double s = u_off[a];
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * u_lin(i, a);
  return s;
}

double Instance::v(std::span<const double> x, std::size_t a) const {
  if (x.size() != dim()) throw DimensionError("decision", dim(), x.size());
  double s = v_off[a];
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * v_lin(i, a);
  return s;
}

Vec Instance::v_all(std::span<const double> x) const {
  Vec out(n_actions());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = v(x, a);
  return out;
}

Vec Instance::u_all(std::span<const double> x) const {
  Vec out(n_actions());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = u(x, a);
  return out;
}

namespace {

void check_finite(const std::vector<double>& xs, const char* what) {
  for (double x : xs)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " contains a non-finite value");
}

}  // namespace

void Instance::validate() const {
  const std::size_t d = dim(), n = n_actions();
  if (n == 0) throw std::invalid_argument("instance needs at least one action");
  if (u_lin.rows() != d) throw DimensionError("u_lin rows", d, u_lin.rows());
  if (u_lin.cols() != n) throw DimensionError("u_lin columns", n, u_lin.cols());
  if (v_lin.rows() != d) throw DimensionError("v_lin rows", d, v_lin.rows());
  if (v_lin.cols() != n) throw DimensionError("v_lin columns", n, v_lin.cols());
  if (u_off.size() != n) throw DimensionError("u_off", n, u_off.size());
  if (v_off.size() != n) throw DimensionError("v_off", n, v_off.size());
  check_finite(u_lin.data(), "u_lin");
  check_finite(v_lin.data(), "v_lin");
  check_finite(u_off, "u_off");
  check_finite(v_off, "v_off");
  if (n_signals < n)
    throw std::invalid_argument("n_signals must be at least the number of actions");
  if (mean) {
    if (mean->size() != d) throw DimensionError("constraint mean", d, mean->size());
    if (!space.contains(*mean)) throw std::invalid_argument("constraint mean is not a feasible point");
  }
}

double PersuasionInstance::p0() const { return *std::min_element(prior.begin(), prior.end()); }

void PersuasionInstance::validate() const {
  const std::size_t k = states.size(), n = actions.size();
  if (k == 0) throw std::invalid_argument("persuasion instance needs at least one state");
  if (n == 0) throw std::invalid_argument("persuasion instance needs at least one action");
  if (prior.size() != k) throw DimensionError("prior", k, prior.size());
  if (sender_u.rows() != k) throw DimensionError("sender_u rows", k, sender_u.rows());
  if (sender_u.cols() != n) throw DimensionError("sender_u columns", n, sender_u.cols());
  if (receiver_v.rows() != k) throw DimensionError("receiver_v rows", k, receiver_v.rows());
  if (receiver_v.cols() != n) throw DimensionError("receiver_v columns", n, receiver_v.cols());
  check_finite(sender_u.data(), "sender_u");
  check_finite(receiver_v.data(), "receiver_v");
  if (!DecisionSpace::simplex(k).contains(prior)) throw std::invalid_argument("prior is not a distribution");
  if (n_signals < n) throw std::invalid_argument("n_signals must be at least the number of actions");
}

Instance PersuasionInstance::to_generalized() const {
  validate();
  Instance inst;
  inst.space = DecisionSpace::simplex(states.size());
  inst.actions = actions;
  inst.n_signals = n_signals;
  inst.u_lin = sender_u;
  inst.v_lin = receiver_v;
  inst.u_off.assign(actions.size(), 0.0);
  inst.v_off.assign(actions.size(), 0.0);
  inst.mean = prior;
  inst.family.family = "persuasion";
  inst.family.p0 = p0();
  return inst;
}

Vec PrincipalStrategy::mean() const {
  if (signals.empty()) return {};
  Vec m(signals.front().decision.size(), 0.0);
  for (const auto& sig : signals) {
    if (sig.decision.size() != m.size()) throw DimensionError("decision", m.size(), sig.decision.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += sig.prob * sig.decision[i];
  }
  return m;
}

AgentStrategy AgentStrategy::pure(const std::vector<std::size_t>& actions, std::size_t n_actions) {
  AgentStrategy rho;
  for (std::size_t a : actions) {
    if (a >= n_actions) throw std::out_of_range("action index out of range");
    Vec row(n_actions, 0.0);
    row[a] = 1.0;
    rho.rows.push_back(std::move(row));
  }
  return rho;
}

AgentStrategy AgentStrategy::uniform(std::size_t n_signals, std::size_t n_actions) {
  AgentStrategy rho;
  rho.rows.assign(n_signals, Vec(n_actions, 1.0 / static_cast<double>(n_actions)));
  return rho;
}

bool AgentStrategy::deterministic(double tol) const {
  for (const auto& row : rows)
    if (*std::max_element(row.begin(), row.end()) < 1.0 - tol) return false;
  return true;
}

void AgentStrategy::validate(std::size_t n_actions, double tol) const {
  for (const auto& row : rows) {
    if (row.size() != n_actions) throw DimensionError("agent strategy actions", n_actions, row.size());
    for (double p : row)
      if (!(p >= -tol)) throw std::invalid_argument("agent strategy has a negative probability");
    if (std::abs(sum(row) - 1.0) > tol) throw std::invalid_argument("agent strategy row does not sum to 1");
  }
}

void validate_strategy(const Instance& inst, const PrincipalStrategy& pi, double prob_tol, double mean_tol) {
  if (pi.signals.empty()) throw std::invalid_argument("principal strategy has no signals");
  double total = 0.0;
  for (const auto& sig : pi.signals) {
    if (!(sig.prob >= -prob_tol)) throw std::invalid_argument("signal probability is negative");
    if (sig.decision.size() != inst.dim()) throw DimensionError("decision", inst.dim(), sig.decision.size());
    if (!inst.space.contains(sig.decision, 1e-9)) throw std::invalid_argument("signal decision is infeasible");
    total += sig.prob;
  }
  if (std::abs(total - 1.0) > prob_tol) throw std::invalid_argument("signal probabilities do not sum to 1");
  if (inst.mean && max_abs_diff(pi.mean(), *inst.mean) > mean_tol)
    throw std::invalid_argument("principal strategy violates the mean constraint");
}

}  // namespace palab
