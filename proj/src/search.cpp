#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "palab/constructions.hpp"
#include "palab/parallel.hpp"
#include "palab/solvers.hpp"

namespace palab {

const ObjectiveValue& ObjectiveSet::get(Objective o) const {
  switch (o) {
    case Objective::UnderD: return under_d;
    case Objective::UnderR: return under_r;
    case Objective::OverD: return over_d;
    case Objective::OverR: return over_r;
  }
  throw std::invalid_argument("unknown objective");
}

namespace {

constexpr std::array<Objective, 4> kAll{Objective::UnderD, Objective::UnderR, Objective::OverD, Objective::OverR};

double eval_one(const Instance& inst, const PrincipalStrategy& pi, double delta, Objective o) {
  switch (o) {
    case Objective::UnderD: return worst_case_delta_br(inst, pi, delta, false).value;
    case Objective::UnderR: return worst_case_delta_br(inst, pi, delta, true).value;
    case Objective::OverD: return best_case_delta_br(inst, pi, delta, false).value;
    case Objective::OverR: return best_case_delta_br(inst, pi, delta, true).value;
  }
  return 0.0;
}

using Values = std::array<double, 4>;

Values eval_all(const Instance& inst, const PrincipalStrategy& pi, double delta) {
  Values v;
  for (std::size_t k = 0; k < 4; ++k) v[k] = eval_one(inst, pi, delta, kAll[k]);
  return v;
}

// Best candidate per objective; strict improvement only, so the first
// candidate in scan order wins ties.
struct Tracker {
  Values best{-kInf, -kInf, -kInf, -kInf};
  std::array<PrincipalStrategy, 4> pi;
  std::size_t count = 0;

  void offer(const PrincipalStrategy& cand, const Values& v) {
    ++count;
    for (std::size_t k = 0; k < 4; ++k) {
      if (v[k] > best[k]) {
        best[k] = v[k];
        pi[k] = cand;
      }
    }
  }

  void merge(const Tracker& other) {
    count += other.count;
    for (std::size_t k = 0; k < 4; ++k) {
      if (other.best[k] > best[k]) {
        best[k] = other.best[k];
        pi[k] = other.pi[k];
      }
    }
  }
};

PrincipalStrategy strip_zero(const PrincipalStrategy& pi) {
  PrincipalStrategy out;
  for (const auto& s : pi.signals)
    if (s.prob > 1e-15) out.signals.push_back(s);
  return out;
}

void offer(Tracker& tr, const Instance& inst, const PrincipalStrategy& pi, double delta) {
  PrincipalStrategy clean = strip_zero(pi);
  if (clean.signals.empty()) return;
  tr.offer(clean, eval_all(inst, clean, delta));
}

// Exhaustive search over two-posterior splits of a two-state mean.
Tracker grid_search(const Instance& inst, double delta, std::size_t k) {
  const double c = (*inst.mean)[0];
  std::vector<double> lower, upper;
  for (std::size_t j = 0; j <= k; ++j) {
    double m = static_cast<double>(j) / static_cast<double>(k);
    if (m < c) lower.push_back(m);
    if (m > c) upper.push_back(m);
  }
  lower.push_back(c);
  upper.insert(upper.begin(), c);

  const std::size_t chunks = 64;
  std::vector<Tracker> parts(chunks);
  parallel_chunks(lower.size(), chunks, worker_count(), [&](std::size_t chunk, std::size_t b, std::size_t e) {
    Tracker& tr = parts[chunk];
    for (std::size_t i = b; i < e; ++i) {
      const double m1 = lower[i];
      for (double m2 : upper) {
        PrincipalStrategy pi;
        if (m2 - m1 < 1e-15) {
          pi.signals.push_back({1.0, {c, 1.0 - c}});
        } else {
          double p1 = (m2 - c) / (m2 - m1);
          pi.signals.push_back({p1, {m1, 1.0 - m1}});
          pi.signals.push_back({1.0 - p1, {m2, 1.0 - m2}});
        }
        offer(tr, inst, pi, delta);
      }
    }
  });
  Tracker all;
  for (const auto& p : parts) all.merge(p);
  return all;
}

Vec random_point(const DecisionSpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::size_t d = space.dim();
  Vec x(d);
  if (space.kind() == SpaceKind::Simplex) {
    if (U(rng) < 0.3) {
      x.assign(d, 0.0);
      x[rng() % d] = 1.0;
      return x;
    }
    double tot = 0.0;
    for (auto& v : x) tot += v = -std::log(1.0 - U(rng));
    for (auto& v : x) v /= tot;
    return x;
  }
  for (std::size_t i = 0; i < d; ++i) {
    double r = U(rng);
    x[i] = r < 0.15 ? space.lo()[i] : r < 0.3 ? space.hi()[i] : space.lo()[i] + U(rng) * (space.hi()[i] - space.lo()[i]);
  }
  return x;
}

PrincipalStrategy random_strategy(const Instance& inst, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::size_t k = 1 + rng() % inst.n_signals;
  PrincipalStrategy pi;
  double tot = 0.0;
  for (std::size_t s = 0; s < k; ++s) {
    double w = -std::log(1.0 - U(rng));
    tot += w;
    pi.signals.push_back({w, random_point(inst.space, rng)});
  }
  for (auto& s : pi.signals) s.prob /= tot;
  if (!inst.mean) return pi;

  // Recentre the points around the mean and shrink until all are feasible.
  const Vec& c = *inst.mean;
  Vec m = pi.mean();
  double t = kInf;
  std::vector<Vec> dirs;
  for (auto& s : pi.signals) {
    Vec w(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) w[i] = s.decision[i] - m[i];
    t = std::min(t, inst.space.exit_time(c, w));
    dirs.push_back(std::move(w));
  }
  if (!std::isfinite(t)) t = 0.0;
  t = std::min(t, 1.0) * (0.5 + 0.5 * U(rng));
  for (std::size_t s = 0; s < pi.size(); ++s) {
    Vec x(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) x[i] = c[i] + t * dirs[s][i];
    pi.signals[s].decision = inst.space.clamp(x);
  }
  return pi;
}

// Coordinate-wise local search that keeps every decision feasible and the
// mean fixed. Each accepted point is offered to the tracker.
void refine(const Instance& inst, double delta, Objective o, PrincipalStrategy start, std::size_t sweeps,
            Tracker& tr) {
  const std::size_t d = inst.dim();
  const bool simplex = inst.space.kind() == SpaceKind::Simplex;
  const bool constrained = inst.mean.has_value();
  double scale = simplex ? 1.0 : inst.space.diameter(Norm::Linf);
  if (scale <= 0.0) return;
  // pad to n_signals so the search can open new signals
  while (start.size() < inst.n_signals) start.signals.push_back({0.0, start.signals.front().decision});
  std::vector<double> p;
  std::vector<Vec> x;
  for (const auto& s : start.signals) {
    p.push_back(s.prob);
    x.push_back(s.decision);
  }
  const std::size_t S = p.size();
  auto build = [&](const std::vector<double>& pp, const std::vector<Vec>& xx) {
    PrincipalStrategy pi;
    for (std::size_t s = 0; s < S; ++s) pi.signals.push_back({pp[s], xx[s]});
    return pi;
  };
  double cur = eval_one(inst, strip_zero(build(p, x)), delta, o);
  double alpha = 0.25 * scale, beta = 0.25;

  auto try_move = [&](std::vector<double>& np, std::vector<Vec>& nx) {
    for (std::size_t s = 0; s < S; ++s) {
      if (np[s] < -1e-15) return false;
      np[s] = std::max(np[s], 0.0);
      if (np[s] > 0.0 && !inst.space.contains(nx[s], 1e-12)) return false;
    }
    PrincipalStrategy cand = strip_zero(build(np, nx));
    if (cand.signals.empty()) return false;
    double val = eval_one(inst, cand, delta, o);
    if (val > cur + 1e-12) {
      cur = val;
      p = np;
      x = nx;
      offer(tr, inst, cand, delta);
      return true;
    }
    return false;
  };

  for (std::size_t sweep = 0; sweep < sweeps && alpha > 1e-7; ++sweep) {
    bool improved = false;
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t t = 0; t < S; ++t) {
        if (constrained && s == t) continue;
        for (std::size_t i = 0; i < d; ++i) {
          for (std::size_t j = 0; j < d; ++j) {
            if (constrained && simplex) {
              // move mass alpha of coordinate i from signal t to signal s
              // (j == i), or swap coordinates i/j between them (j != i)
              auto np = p;
              auto nx = x;
              std::vector<double> ys = x[s], yt = x[t];
              for (auto& v : ys) v *= p[s];
              for (auto& v : yt) v *= p[t];
              ys[i] += alpha;
              yt[i] -= alpha;
              if (j != i) {
                ys[j] -= alpha;
                yt[j] += alpha;
              } else {
                np[s] += alpha;
                np[t] -= alpha;
              }
              if (np[t] < -1e-15 || np[s] <= 0.0) continue;
              for (std::size_t q = 0; q < d; ++q) {
                nx[s][q] = ys[q] / np[s];
                nx[t][q] = np[t] > 1e-15 ? yt[q] / np[t] : x[t][q];
              }
              if (np[t] <= 1e-15) {
                bool zero = true;
                for (double v : yt) zero = zero && std::abs(v) < 1e-12;
                if (!zero) continue;
                np[t] = 0.0;
              }
              improved |= try_move(np, nx);
            } else if (constrained) {
              if (j != 0 && j != 1) continue;
              auto np = p;
              auto nx = x;
              if (j == 0) {
                // shift lifted mass along coordinate i
                if (p[s] <= 0.0 || p[t] <= 0.0) continue;
                nx[s][i] += alpha / p[s];
                nx[t][i] -= alpha / p[t];
              } else {
                // change probabilities keeping lifted points fixed
                if (i != 0 || p[t] <= beta) continue;
                np[s] += beta;
                np[t] -= beta;
                for (std::size_t q = 0; q < d; ++q) {
                  nx[s][q] = p[s] > 0.0 ? x[s][q] * p[s] / np[s] : x[s][q];
                  nx[t][q] = x[t][q] * p[t] / np[t];
                }
              }
              improved |= try_move(np, nx);
            } else {
              if (s == t) {
                // move decision s along e_i - e_j (simplex) or +-e_i (box)
                if (simplex && i == j) continue;
                if (!simplex && j > 1) continue;
                auto nx = x;
                auto np = p;
                if (simplex) {
                  nx[s][i] += alpha;
                  nx[s][j] -= alpha;
                } else {
                  nx[s][i] += j == 0 ? alpha : -alpha;
                }
                improved |= try_move(np, nx);
              } else if (i == 0 && j == 0) {
                auto np = p;
                auto nx = x;
                np[s] += beta;
                np[t] -= beta;
                improved |= try_move(np, nx);
              }
            }
          }
        }
      }
    }
    if (!improved) {
      alpha *= 0.5;
      beta *= 0.5;
    }
  }
}

}  // namespace

ObjectiveSet search_objectives(const Instance& inst, double delta, const SearchBudget& budget) {
  if (!(delta >= 0.0)) throw std::invalid_argument("search_objectives: delta must be >= 0");
  InstanceAnalysis an = analyze(inst);
  ObjectiveSet out;
  out.delta = delta;
  out.U_star = an.U_star;

  Tracker tr;
  offer(tr, inst, an.witness.pi, delta);
  if (inst.mean) {
    offer(tr, inst, PrincipalStrategy{{{1.0, *inst.mean}}}, delta);
  } else {
    offer(tr, inst, PrincipalStrategy{{{1.0, inst.space.center()}}}, delta);
    for (const auto& y : an.anchors) offer(tr, inst, PrincipalStrategy{{{1.0, y}}}, delta);
  }
  if (an.G > 0.0 && std::isfinite(an.G) && delta < an.G) {
    for (double eps : {1e-9, 1e-6, 1e-4, 1e-2}) {
      try {
        auto rs = build_robust_scheme(inst, an, an.witness.pi, an.witness.rho, delta, eps * an.G);
        offer(tr, inst, rs.pi, delta);
      } catch (const std::exception&) {
        // candidate unavailable for this epsilon; the others still count
      }
    }
  }

  const bool two_state_grid =
      inst.mean && inst.space.kind() == SpaceKind::Simplex && inst.dim() == 2 && budget.grid > 0;
  if (two_state_grid) {
    out.method = "grid";
    tr.merge(grid_search(inst, delta, budget.grid));
  } else {
    out.method = "random+refine";
    std::mt19937_64 rng(budget.seed);
    for (std::size_t k = 0; k < budget.samples; ++k) offer(tr, inst, random_strategy(inst, rng), delta);
    for (std::size_t k = 0; k < 4; ++k) {
      PrincipalStrategy start = tr.pi[k];
      refine(inst, delta, kAll[k], start, budget.refine, tr);
    }
  }
  out.candidates = tr.count;

  ObjectiveValue* slots[4] = {&out.under_d, &out.under_r, &out.over_d, &out.over_r};
  for (std::size_t k = 0; k < 4; ++k) {
    slots[k]->which = kAll[k];
    slots[k]->value = tr.best[k];
    slots[k]->pi = tr.pi[k];
    bool minimize = kAll[k] == Objective::UnderD || kAll[k] == Objective::UnderR;
    bool randomized = kAll[k] == Objective::UnderR || kAll[k] == Objective::OverR;
    slots[k]->rho = minimize ? worst_case_delta_br(inst, tr.pi[k], delta, randomized).rho
                             : best_case_delta_br(inst, tr.pi[k], delta, randomized).rho;
  }
  return out;
}

ObjectiveValue obj_outer_search(const Instance& inst, double delta, Objective which, const SearchBudget& budget) {
  return search_objectives(inst, delta, budget).get(which);
}

}  // namespace palab
