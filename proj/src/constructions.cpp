#include "palab/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace palab {

namespace {

std::size_t argmax_row(const Vec& row) {
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

// Minimum over a' != a of v(x, a) - v(x, a').
double margin(const Instance& inst, const Vec& x, std::size_t a) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < inst.n_actions(); ++b)
    if (b != a) m = std::min(m, inst.v(x, a) - inst.v(x, b));
  return m;
}

struct MeanFix {
  double eta = 0.0;
  std::optional<Vec> z;
};

// Ray from mu through c until it meets the boundary at z; mixing mu and z
// with weight eta = 1/t* lands exactly on c.
MeanFix restore_mean(const Instance& inst, const Vec& mu) {
  MeanFix fix;
  if (!inst.mean) return fix;
  const Vec& c = *inst.mean;
  Vec dir(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) dir[i] = c[i] - mu[i];
  if (norm_linf(dir) <= 1e-15) return fix;
  double t = inst.space.exit_time(mu, dir);
  if (!std::isfinite(t) || t < 1.0) throw std::runtime_error("mean restoration: ray does not reach the boundary");
  Vec z(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) z[i] = mu[i] + t * dir[i];
  fix.z = inst.space.clamp(z);
  fix.eta = 1.0 / t;
  return fix;
}

}  // namespace

double perturbation_constant(const InstanceAnalysis& an) {
  double K = an.diam * an.L;
  if (an.constrained) K += 2.0 * an.B * an.diam / *an.dist;
  return K;
}

double randomized_design_delta(const InstanceAnalysis& an, double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("randomized_design_delta: delta must be >= 0");
  if (!(an.G > 0.0)) throw std::invalid_argument("randomized_design_delta: needs a positive inducibility gap");
  const double balanced = std::sqrt(2.0 * an.B * delta * an.G / perturbation_constant(an));
  return std::max(delta, std::min(balanced, 0.5 * an.G));
}

RobustScheme build_robust_scheme(const Instance& inst, const InstanceAnalysis& an, const PrincipalStrategy& pi_opt,
                                 const AgentStrategy& rho_opt, double delta, double epsilon) {
  if (!(delta >= 0.0)) throw std::invalid_argument("build_robust_scheme: delta must be >= 0");
  if (!(an.G > 0.0)) throw std::invalid_argument("build_robust_scheme: needs a positive inducibility gap");
  if (!(delta < an.G)) throw std::invalid_argument("build_robust_scheme: needs delta < G");
  if (rho_opt.size() != pi_opt.size()) throw DimensionError("signals", pi_opt.size(), rho_opt.size());
  if (epsilon <= 0.0) epsilon = std::isinf(an.G) ? 1e-3 : 1e-3 * an.G;

  RobustScheme out;
  for (const auto& row : rho_opt.rows) out.intended.push_back(argmax_row(row));

  double theta = std::isinf(an.G) ? 0.0 : delta / an.G + epsilon;
  for (int attempt = 0; attempt < 2; ++attempt) {
    theta = std::min(theta, 1.0);
    out.pi.signals.clear();
    bool ok = true;
    for (std::size_t s = 0; s < pi_opt.size(); ++s) {
      const auto& sig = pi_opt.signals[s];
      Vec x = inst.space.clamp(lerp(sig.decision, an.anchors[out.intended[s]], theta));
      if (sig.prob > 0.0 && inst.n_actions() > 1 && !(margin(inst, x, out.intended[s]) > delta + 1e-9)) ok = false;
      out.pi.signals.push_back({sig.prob, std::move(x)});
    }
    if (ok) break;
    if (attempt == 1) throw std::runtime_error("build_robust_scheme: strict margin not reached");
    theta = theta * (1.0 + 1e-6) + 1e-9;
  }

  MeanFix fix = restore_mean(inst, out.pi.mean());
  if (fix.z) {
    for (auto& sig : out.pi.signals) sig.prob *= 1.0 - fix.eta;
    out.pi.signals.push_back({fix.eta, *fix.z});
    out.expanded = out.pi.size() > inst.n_signals;
  }
  out.params = {theta, fix.eta, fix.z, epsilon};
  return out;
}

Embedding embed_exact_br(const Instance& inst, const InstanceAnalysis& an, const PrincipalStrategy& pi,
                         const AgentStrategy& rho) {
  if (!(an.G > 0.0)) throw std::invalid_argument("embed_exact_br: needs a positive inducibility gap");
  if (rho.size() != pi.size()) throw DimensionError("signals", pi.size(), rho.size());
  Embedding out;
  auto loss = suboptimality(inst, pi);
  std::vector<std::size_t> acts;
  for (std::size_t s = 0; s < pi.size(); ++s) {
    for (std::size_t a = 0; a < inst.n_actions(); ++a) {
      const double w = pi.signals[s].prob * rho.rows[s][a];
      if (w <= 0.0) continue;
      const double d = loss[s][a];
      out.delta += w * d;
      const double theta = std::isinf(an.G) ? 0.0 : d / (an.G + d);
      out.pi.signals.push_back({w, inst.space.clamp(lerp(pi.signals[s].decision, an.anchors[a], theta))});
      out.labels.push_back({s, a, false});
      acts.push_back(a);
    }
  }
  double total = 0.0;
  for (const auto& sig : out.pi.signals) total += sig.prob;
  for (auto& sig : out.pi.signals) sig.prob /= total;

  MeanFix fix = restore_mean(inst, out.pi.mean());
  if (fix.z) {
    for (auto& sig : out.pi.signals) sig.prob *= 1.0 - fix.eta;
    out.pi.signals.push_back({fix.eta, *fix.z});
    PrincipalStrategy zonly{{{1.0, *fix.z}}};
    acts.push_back(argmax_row(favorable_best_response(inst, zonly).rows[0]));
    out.labels.push_back({0, acts.back(), true});
    out.eta = fix.eta;
  }
  out.rho = AgentStrategy::pure(acts, inst.n_actions());
  return out;
}

FilterResult filter_to_delta_optimal(const Instance& inst, const PrincipalStrategy& pi, const AgentStrategy& rho,
                                     double Delta) {
  if (!(Delta > 0.0)) throw std::invalid_argument("filter_to_delta_optimal: Delta must be positive");
  if (rho.size() != pi.size()) throw DimensionError("signals", pi.size(), rho.size());
  FilterResult out;
  out.rho = rho;
  out.replaced.assign(pi.size(), 0);
  for (std::size_t s = 0; s < pi.size(); ++s) {
    auto keep = best_response_set(inst, pi.signals[s].decision, Delta);
    Vec row(inst.n_actions(), 0.0);
    double mass = 0.0;
    for (std::size_t a : keep) mass += rho.rows[s][a];
    if (mass > 0.0) {
      for (std::size_t a : keep) row[a] = rho.rows[s][a] / mass;
    } else {
      for (std::size_t a : keep) row[a] = 1.0 / static_cast<double>(keep.size());
      out.replaced[s] = 1;
    }
    out.rho.rows[s] = std::move(row);
  }
  return out;
}

}  // namespace palab
