#include "palab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

#include "lifted.hpp"

namespace palab {

namespace {

// Recover x = y / p from a lifted solution, scrubbing round-off.
Vec unlift(const DecisionSpace& space, const Vec& sol, std::size_t y0, double p) {
  Vec x(space.dim());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = sol[y0 + i] / p;
  return space.clamp(x);
}

StackelbergResult stackelberg_unconstrained(const Instance& inst) {
  const std::size_t d = inst.dim(), n = inst.n_actions();
  StackelbergResult best;
  bool found = false;
  for (std::size_t a = 0; a < n; ++a) {
    LpProblem lp(d);
    for (std::size_t i = 0; i < d; ++i) lp.set_objective(i, inst.u_lin(i, a));
    if (inst.space.kind() == SpaceKind::Simplex) {
      lp.add_row(Vec(d, 1.0), Sense::Eq, 1.0);
    } else {
      for (std::size_t i = 0; i < d; ++i) lp.set_bounds(i, inst.space.lo()[i], inst.space.hi()[i]);
    }
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a) continue;
      Vec row(d);
      for (std::size_t i = 0; i < d; ++i) row[i] = inst.v_lin(i, a) - inst.v_lin(i, b);
      lp.add_row(std::move(row), Sense::Ge, inst.v_off[b] - inst.v_off[a]);
    }
    LpSolution sol = solve(lp);
    if (sol.status == LpStatus::Infeasible) continue;
    if (sol.status != LpStatus::Optimal) throw std::runtime_error("stackelberg_value: per-action LP unbounded");
    double val = sol.value + inst.u_off[a];
    if (!found || val > best.value) {
      found = true;
      best.value = val;
      best.pi = PrincipalStrategy{{{1.0, inst.space.clamp(sol.x)}}};
      best.rho = AgentStrategy::pure({a}, n);
    }
  }
  if (!found) throw std::runtime_error("stackelberg_value: no action is inducible");
  return best;
}

StackelbergResult stackelberg_constrained(const Instance& inst) {
  const std::size_t d = inst.dim(), n = inst.n_actions(), stride = d + 1;
  LpProblem lp(n * stride);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < d; ++i) lp.set_objective(a * stride + i, inst.u_lin(i, a));
    lp.set_objective(a * stride + d, inst.u_off[a]);
    detail::add_lifted_space_rows(lp, inst.space, a * stride, a * stride + d);
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a) continue;
      Vec row(n * stride, 0.0);
      for (std::size_t i = 0; i < d; ++i) row[a * stride + i] = inst.v_lin(i, a) - inst.v_lin(i, b);
      row[a * stride + d] = inst.v_off[a] - inst.v_off[b];
      lp.add_row(std::move(row), Sense::Ge, 0.0);
    }
  }
  detail::add_lifted_mean_rows(lp, inst, n, stride, d);
  LpSolution sol = solve(lp);
  if (sol.status == LpStatus::Infeasible) throw std::runtime_error("stackelberg_value: lifted LP infeasible");
  if (sol.status != LpStatus::Optimal) throw std::runtime_error("stackelberg_value: lifted LP unbounded");

  StackelbergResult out;
  out.value = sol.value;
  std::vector<std::size_t> acts;
  for (std::size_t a = 0; a < n; ++a) {
    double p = sol.x[a * stride + d];
    if (p <= 1e-12) continue;
    out.pi.signals.push_back({p, unlift(inst.space, sol.x, a * stride, p)});
    acts.push_back(a);
  }
  double total = 0.0;
  for (const auto& s : out.pi.signals) total += s.prob;
  for (auto& s : out.pi.signals) s.prob /= total;
  out.rho = AgentStrategy::pure(acts, n);
  return out;
}

}  // namespace

StackelbergResult stackelberg_value(const Instance& inst) {
  inst.validate();
  return inst.mean ? stackelberg_constrained(inst) : stackelberg_unconstrained(inst);
}

GapResult inducibility_gap(const Instance& inst) {
  inst.validate();
  const std::size_t d = inst.dim(), n = inst.n_actions();
  GapResult out;
  if (n == 1) {
    out.G = std::numeric_limits<double>::infinity();
    out.anchors.push_back(inst.space.center());
    return out;
  }
  out.G = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) {
    LpProblem lp(d + 1);
    lp.set_objective(d, 1.0);
    lp.set_bounds(d, -kInf, kInf);
    if (inst.space.kind() == SpaceKind::Simplex) {
      Vec row(d + 1, 1.0);
      row[d] = 0.0;
      lp.add_row(std::move(row), Sense::Eq, 1.0);
    } else {
      for (std::size_t i = 0; i < d; ++i) lp.set_bounds(i, inst.space.lo()[i], inst.space.hi()[i]);
    }
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a) continue;
      Vec row(d + 1);
      for (std::size_t i = 0; i < d; ++i) row[i] = inst.v_lin(i, a) - inst.v_lin(i, b);
      row[d] = -1.0;
      lp.add_row(std::move(row), Sense::Ge, inst.v_off[b] - inst.v_off[a]);
    }
    LpSolution sol = solve_or_throw(lp, "inducibility_gap");
    out.anchors.push_back(inst.space.clamp(Vec(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(d))));
    out.G = std::min(out.G, sol.value);
  }
  return out;
}

InstanceAnalysis analyze(const Instance& inst) {
  InstanceAnalysis an;
  an.witness = stackelberg_value(inst);
  an.U_star = an.witness.value;
  auto gap = inducibility_gap(inst);
  an.G = gap.G;
  an.anchors = std::move(gap.anchors);
  an.norm = inst.space.natural_norm();
  an.diam = inst.space.diameter(an.norm);
  for (std::size_t a = 0; a < inst.n_actions(); ++a) {
    Vec col = inst.u_lin.column(a);
    an.B = std::max({an.B, std::abs(inst.space.max_affine(col, inst.u_off[a])),
                     std::abs(inst.space.min_affine(col, inst.u_off[a]))});
    // dual norm: l1 pairs with l-infinity and vice versa
    an.L = std::max(an.L, an.norm == Norm::L1 ? norm_linf(col) : norm_l1(col));
  }
  if (inst.mean) {
    an.constrained = true;
    an.dist = inst.space.boundary_distance(*inst.mean);
    an.min_mean = *std::min_element(inst.mean->begin(), inst.mean->end());
  }
  an.family = inst.family;
  return an;
}

namespace {

InnerResult deterministic_inner(const Instance& inst, const PrincipalStrategy& pi, double delta, bool minimize) {
  std::vector<std::size_t> picks;
  for (const auto& sig : pi.signals) {
    auto set = best_response_set(inst, sig.decision, delta);
    std::size_t pick = set.front();
    double best = inst.u(sig.decision, pick);
    for (std::size_t a : set) {
      double ua = inst.u(sig.decision, a);
      if (minimize ? ua < best : ua > best) {
        best = ua;
        pick = a;
      }
    }
    picks.push_back(pick);
  }
  InnerResult r;
  r.rho = AgentStrategy::pure(picks, inst.n_actions());
  r.value = principal_utility(inst, pi, r.rho);
  return r;
}

InnerResult randomized_inner(const Instance& inst, const PrincipalStrategy& pi, double delta, bool minimize) {
  const std::size_t S = pi.size(), n = inst.n_actions();
  LpProblem lp(S * n, !minimize);
  Vec vrow(S * n, 0.0);
  double vstar = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    const auto& sig = pi.signals[s];
    Vec vals = inst.v_all(sig.decision);
    vstar += sig.prob * *std::max_element(vals.begin(), vals.end());
    Vec simplex_row(S * n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
      lp.set_objective(s * n + a, sig.prob * inst.u(sig.decision, a));
      vrow[s * n + a] = sig.prob * vals[a];
      simplex_row[s * n + a] = 1.0;
    }
    lp.add_row(std::move(simplex_row), Sense::Eq, 1.0);
  }
  lp.add_row(std::move(vrow), Sense::Ge, vstar - delta - 1e-12);
  LpSolution sol = solve_or_throw(lp, "delta best response");
  InnerResult r;
  r.rho.rows.assign(S, Vec(n, 0.0));
  for (std::size_t s = 0; s < S; ++s) {
    double tot = 0.0;
    for (std::size_t a = 0; a < n; ++a) tot += r.rho.rows[s][a] = std::max(0.0, sol.x[s * n + a]);
    for (std::size_t a = 0; a < n; ++a) r.rho.rows[s][a] /= tot;
  }
  r.value = principal_utility(inst, pi, r.rho);
  return r;
}

}  // namespace

InnerResult worst_case_delta_br(const Instance& inst, const PrincipalStrategy& pi, double delta, bool randomized) {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
  return randomized ? randomized_inner(inst, pi, delta, true) : deterministic_inner(inst, pi, delta, true);
}

InnerResult best_case_delta_br(const Instance& inst, const PrincipalStrategy& pi, double delta, bool randomized) {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
  return randomized ? randomized_inner(inst, pi, delta, false) : deterministic_inner(inst, pi, delta, false);
}

const char* to_string(Objective o) {
  switch (o) {
    case Objective::UnderD: return "under_d";
    case Objective::UnderR: return "under_r";
    case Objective::OverD: return "over_d";
    case Objective::OverR: return "over_r";
  }
  return "?";
}

Objective parse_objective(const std::string& s) {
  if (s == "under_d" || s == "UnderD") return Objective::UnderD;
  if (s == "under_r" || s == "UnderR") return Objective::UnderR;
  if (s == "over_d" || s == "OverD") return Objective::OverD;
  if (s == "over_r" || s == "OverR") return Objective::OverR;
  throw std::invalid_argument("unknown objective '" + s + "'");
}

std::size_t worker_count() {
  if (const char* env = std::getenv("PALAB_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace palab
