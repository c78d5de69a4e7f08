#pragma once

// Independent brute-force references used to freeze expected values. They
// share no code with the library beyond the problem/instance types.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "palab/instance.hpp"
#include "palab/lp.hpp"

namespace oracle {

using palab::Vec;

// Gaussian elimination with partial pivoting; nullopt when singular.
inline std::optional<Vec> gauss_solve(std::vector<Vec> a, Vec b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (std::abs(a[p][c]) < 1e-11) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

struct Halfspace {
  Vec a;
  double b;
  bool equality;
};

inline std::vector<Halfspace> halfspaces(const palab::LpProblem& lp) {
  std::vector<Halfspace> hs;
  const std::size_t n = lp.n_vars();
  for (const auto& r : lp.rows()) {
    if (r.sense == palab::Sense::Eq) {
      hs.push_back({r.coeffs, r.rhs, true});
    } else if (r.sense == palab::Sense::Le) {
      hs.push_back({r.coeffs, r.rhs, false});
    } else {
      Vec neg = r.coeffs;
      for (double& v : neg) v = -v;
      hs.push_back({neg, -r.rhs, false});
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(lp.lower()[j])) {
      Vec a(n, 0.0);
      a[j] = -1.0;
      hs.push_back({a, -lp.lower()[j], false});
    }
    if (std::isfinite(lp.upper()[j])) {
      Vec a(n, 0.0);
      a[j] = 1.0;
      hs.push_back({a, lp.upper()[j], false});
    }
  }
  return hs;
}

// Optimal value of a bounded LP by enumerating every basic solution.
// nullopt when no vertex is feasible.
inline std::optional<double> vertex_enumeration(const palab::LpProblem& lp, double feas_tol = 1e-9) {
  const std::size_t n = lp.n_vars();
  auto hs = halfspaces(lp);
  std::vector<std::size_t> eq, ineq;
  for (std::size_t i = 0; i < hs.size(); ++i) (hs[i].equality ? eq : ineq).push_back(i);
  std::optional<double> best;
  std::vector<std::size_t> pick;
  auto try_vertex = [&](const std::vector<std::size_t>& active) {
    // Equalities may be redundant; try every square subsystem drawn from the
    // active set that contains as many equalities as possible.
    std::vector<Vec> a;
    Vec b;
    for (auto i : active) {
      a.push_back(hs[i].a);
      b.push_back(hs[i].b);
    }
    if (a.size() != n) return;
    auto x = gauss_solve(a, b);
    if (!x) return;
    for (const auto& h : hs) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) lhs += h.a[j] * (*x)[j];
      if (h.equality ? std::abs(lhs - h.b) > feas_tol : lhs > h.b + feas_tol) return;
    }
    double val = 0.0;
    for (std::size_t j = 0; j < n; ++j) val += lp.objective()[j] * (*x)[j];
    if (!best || (lp.maximize() ? val > *best : val < *best)) best = val;
  };
  // Choose k equalities (all subsets, to survive redundancy) plus n-k
  // inequalities.
  std::vector<std::size_t> all = eq;
  all.insert(all.end(), ineq.begin(), ineq.end());
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (pick.size() == n) {
      try_vertex(pick);
      return;
    }
    for (std::size_t i = start; i < all.size(); ++i) {
      if (all.size() - i < n - pick.size()) break;
      pick.push_back(all[i]);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return best;
}

// All points of the probability simplex of dimension d on a grid of step 1/k.
inline std::vector<Vec> simplex_grid(std::size_t d, std::size_t k) {
  std::vector<Vec> out;
  Vec cur(d, 0.0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
    if (i + 1 == d) {
      cur[i] = static_cast<double>(left) / static_cast<double>(k);
      out.push_back(cur);
      return;
    }
    for (std::size_t m = 0; m <= left; ++m) {
      cur[i] = static_cast<double>(m) / static_cast<double>(k);
      rec(i + 1, left - m);
    }
  };
  rec(0, k);
  return out;
}

inline double u_at(const palab::Instance& inst, const Vec& x, std::size_t a) {
  double s = inst.u_off[a];
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * inst.u_lin(i, a);
  return s;
}

inline double v_at(const palab::Instance& inst, const Vec& x, std::size_t a) {
  double s = inst.v_off[a];
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * inst.v_lin(i, a);
  return s;
}

// min over a of max over a' != a margins, maximized over grid points.
inline double grid_inducibility_gap(const palab::Instance& inst, const std::vector<Vec>& grid) {
  double G = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < inst.n_actions(); ++a) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& x : grid) {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < inst.n_actions(); ++b)
        if (b != a) m = std::min(m, v_at(inst, x, a) - v_at(inst, x, b));
      best = std::max(best, m);
    }
    G = std::min(G, best);
  }
  return G;
}

// Per-signal worst/best over randomized rho with total agent loss <= delta,
// by enumerating vertices of the feasible polytope. A vertex of
// {rho row-stochastic, loss(rho) <= delta} has every row a point mass except
// at most one row mixing two actions so the loss constraint is tight.
inline double delta_br_vertices(const palab::Instance& inst, const std::vector<double>& probs,
                                const std::vector<Vec>& decisions, double delta, bool minimize) {
  const std::size_t S = probs.size(), n = inst.n_actions();
  std::vector<Vec> loss(S, Vec(n)), util(S, Vec(n));
  for (std::size_t s = 0; s < S; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) best = std::max(best, v_at(inst, decisions[s], a));
    for (std::size_t a = 0; a < n; ++a) {
      loss[s][a] = probs[s] * (best - v_at(inst, decisions[s], a));
      util[s][a] = probs[s] * u_at(inst, decisions[s], a);
    }
  }
  double opt = minimize ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  auto consider = [&](double v) { opt = minimize ? std::min(opt, v) : std::max(opt, v); };
  std::vector<std::size_t> choice(S, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t s) {
    if (s == S) {
      double L = 0.0, U = 0.0;
      for (std::size_t k = 0; k < S; ++k) {
        L += loss[k][choice[k]];
        U += util[k][choice[k]];
      }
      if (L <= delta + 1e-12) consider(U);
      // one mixed row, mixing choice[k] with another action b on the hyperplane
      for (std::size_t k = 0; k < S; ++k) {
        for (std::size_t b = 0; b < n; ++b) {
          double l0 = L, l1 = L - loss[k][choice[k]] + loss[k][b];
          if (std::abs(l1 - l0) < 1e-15) continue;
          double lam = (delta - l0) / (l1 - l0);
          if (lam <= 0.0 || lam >= 1.0) continue;
          double u1 = U - util[k][choice[k]] + util[k][b];
          consider(U + lam * (u1 - U));
        }
      }
      return;
    }
    for (std::size_t a = 0; a < n; ++a) {
      choice[s] = a;
      rec(s + 1);
    }
  };
  rec(0);
  return opt;
}

}  // namespace oracle
