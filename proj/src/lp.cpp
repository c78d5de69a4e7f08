#include "palab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace palab {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

LpProblem::LpProblem(std::size_t n_vars, bool maximize)
    : maximize_(maximize), objective_(n_vars, 0.0), lower_(n_vars, 0.0), upper_(n_vars, kInf) {}

void LpProblem::set_objective(Vec c) {
  if (c.size() != n_vars()) throw DimensionError("objective", n_vars(), c.size());
  objective_ = std::move(c);
}

void LpProblem::set_bounds(std::size_t j, double lo, double hi) {
  if (j >= n_vars()) throw std::out_of_range("variable index out of range");
  if (lo > hi) throw std::invalid_argument("variable bounds must satisfy lo <= hi");
  lower_[j] = lo;
  upper_[j] = hi;
}

void LpProblem::add_row(Vec coeffs, Sense sense, double rhs) {
  if (coeffs.size() != n_vars()) throw DimensionError("constraint row", n_vars(), coeffs.size());
  rows_.push_back({std::move(coeffs), sense, rhs});
}

double LpProblem::max_violation(const Vec& x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < n_vars(); ++j) {
    worst = std::max(worst, lower_[j] - x[j]);
    worst = std::max(worst, x[j] - upper_[j]);
  }
  for (const auto& row : rows_) {
    double lhs = dot(row.coeffs, x);
    if (row.sense != Sense::Ge) worst = std::max(worst, lhs - row.rhs);
    if (row.sense != Sense::Le) worst = std::max(worst, row.rhs - lhs);
  }
  return worst;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-10;
constexpr std::size_t kMaxPivots = 200000;

// How an original variable maps onto nonnegative standard-form columns.
struct VarMap {
  enum Kind { Shift, Flip, Split } kind;
  std::size_t col;
  std::size_t col2;
  double base;
};

class Tableau {
 public:
  Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), a_(m * (n + 1), 0.0), basis_(m, 0) {}

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  double& at(std::size_t i, std::size_t j) { return a_[i * (n_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return a_[i * (n_ + 1) + n_]; }
  double rhs(std::size_t i) const { return a_[i * (n_ + 1) + n_]; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const std::size_t w = n_ + 1;
    double* prow = &a_[r * w];
    const double inv = 1.0 / prow[c];
    for (std::size_t j = 0; j < w; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &a_[i * w];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < w; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
    basis_[r] = c;
  }

  void drop_row(std::size_t r) {
    const std::size_t w = n_ + 1;
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r * w), a_.begin() + static_cast<std::ptrdiff_t>((r + 1) * w));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --m_;
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
};

// Minimizes cost . x over the tableau's columns with allowed[j] set.
LpStatus run_simplex(Tableau& t, const Vec& cost, const std::vector<char>& allowed, std::size_t& pivots) {
  const std::size_t m = t.rows(), n = t.cols();
  std::vector<char> is_basic(n, 0);
  Vec reduced(n);
  while (true) {
    std::fill(is_basic.begin(), is_basic.end(), 0);
    for (std::size_t i = 0; i < m; ++i) is_basic[t.basis()[i]] = 1;
    reduced = cost;
    for (std::size_t i = 0; i < m; ++i) {
      const double cb = cost[t.basis()[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) reduced[j] -= cb * t.at(i, j);
    }
    std::size_t enter = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!allowed[j] || is_basic[j]) continue;
      if (reduced[j] < -kCostTol) {
        enter = j;
        break;
      }
    }
    if (enter == n) return LpStatus::Optimal;

    std::size_t leave = m;
    double best_ratio = kInf;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = t.at(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = std::max(t.rhs(i), 0.0) / a;
      const bool better = leave == m || ratio < best_ratio - 1e-12;
      const bool tie_wins = !better && ratio <= best_ratio + 1e-12 && t.basis()[i] < t.basis()[leave];
      if (better || tie_wins) {
        best_ratio = leave == m ? ratio : std::min(best_ratio, ratio);
        leave = i;
      }
    }
    if (leave == m) return LpStatus::Unbounded;
    t.pivot(leave, enter);
    if (++pivots > kMaxPivots) throw std::runtime_error("simplex exceeded the pivot limit");
  }
}

}  // namespace

LpSolution solve(const LpProblem& lp) {
  const std::size_t n_orig = lp.n_vars();

  std::vector<VarMap> maps(n_orig);
  std::size_t n_struct = 0;
  std::vector<LpRow> rows_std;  // over structural columns, filled below
  struct UpperRow {
    std::size_t col;
    double cap;
  };
  std::vector<UpperRow> uppers;
  for (std::size_t j = 0; j < n_orig; ++j) {
    const double lo = lp.lower()[j], hi = lp.upper()[j];
    if (std::isfinite(lo)) {
      maps[j] = {VarMap::Shift, n_struct++, 0, lo};
      if (std::isfinite(hi)) uppers.push_back({maps[j].col, hi - lo});
    } else if (std::isfinite(hi)) {
      maps[j] = {VarMap::Flip, n_struct++, 0, hi};
    } else {
      maps[j] = {VarMap::Split, n_struct, n_struct + 1, 0.0};
      n_struct += 2;
    }
  }

  // Each standard row: dense structural coefficients, sense, rhs.
  struct StdRow {
    Vec a;
    Sense sense;
    double rhs;
  };
  std::vector<StdRow> rows;
  rows.reserve(lp.rows().size() + uppers.size());
  for (const auto& row : lp.rows()) {
    StdRow r{Vec(n_struct, 0.0), row.sense, row.rhs};
    for (std::size_t j = 0; j < n_orig; ++j) {
      const double c = row.coeffs[j];
      if (c == 0.0) continue;
      const auto& mp = maps[j];
      switch (mp.kind) {
        case VarMap::Shift:
          r.a[mp.col] += c;
          r.rhs -= c * mp.base;
          break;
        case VarMap::Flip:
          r.a[mp.col] -= c;
          r.rhs -= c * mp.base;
          break;
        case VarMap::Split:
          r.a[mp.col] += c;
          r.a[mp.col2] -= c;
          break;
      }
    }
    rows.push_back(std::move(r));
  }
  for (const auto& up : uppers) {
    StdRow r{Vec(n_struct, 0.0), Sense::Le, up.cap};
    r.a[up.col] = 1.0;
    rows.push_back(std::move(r));
  }

  const std::size_t m = rows.size();
  std::size_t n_slack = 0;
  for (const auto& r : rows)
    if (r.sense != Sense::Eq) ++n_slack;

  // Decide which rows need an artificial variable.
  std::vector<int> slack_sign(m, 0);
  std::vector<char> negate(m, 0);
  std::size_t n_art = 0;
  for (std::size_t i = 0; i < m; ++i) {
    negate[i] = rows[i].rhs < 0.0;
    int s = rows[i].sense == Sense::Le ? 1 : rows[i].sense == Sense::Ge ? -1 : 0;
    if (negate[i]) s = -s;
    slack_sign[i] = s;
    if (s != 1) ++n_art;
  }

  const std::size_t n_cols = n_struct + n_slack + n_art;
  Tableau t(m, n_cols);
  std::size_t slack_col = n_struct, art_col = n_struct + n_slack;
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = negate[i] ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n_struct; ++j) t.at(i, j) = sign * rows[i].a[j];
    t.rhs(i) = sign * rows[i].rhs;
    std::size_t basic;
    if (rows[i].sense != Sense::Eq) {
      t.at(i, slack_col) = slack_sign[i];
      basic = slack_col++;
      if (slack_sign[i] != 1) {
        t.at(i, art_col) = 1.0;
        basic = art_col++;
      }
    } else {
      t.at(i, art_col) = 1.0;
      basic = art_col++;
    }
    t.basis()[i] = basic;
  }

  LpSolution sol;
  const std::size_t art_begin = n_struct + n_slack;
  std::vector<char> allowed(n_cols, 1);

  if (n_art > 0) {
    Vec cost1(n_cols, 0.0);
    for (std::size_t j = art_begin; j < n_cols; ++j) cost1[j] = 1.0;
    run_simplex(t, cost1, allowed, sol.pivots);
    double infeas = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (t.basis()[i] >= art_begin) infeas += std::max(t.rhs(i), 0.0);
      scale = std::max(scale, std::abs(t.rhs(i)));
    }
    if (infeas > 1e-8 * scale) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Pivot lingering artificials out of the basis, dropping redundant rows.
    for (std::size_t i = 0; i < t.rows();) {
      if (t.basis()[i] < art_begin) {
        ++i;
        continue;
      }
      std::size_t col = art_begin;
      double best = kPivotTol;
      for (std::size_t j = 0; j < art_begin; ++j) {
        if (std::abs(t.at(i, j)) > best) {
          best = std::abs(t.at(i, j));
          col = j;
        }
      }
      if (col == art_begin) {
        t.drop_row(i);
      } else {
        t.pivot(i, col);
        ++i;
      }
    }
    for (std::size_t j = art_begin; j < n_cols; ++j) allowed[j] = 0;
  }

  Vec cost2(n_cols, 0.0);
  const double sgn = lp.maximize() ? -1.0 : 1.0;
  for (std::size_t j = 0; j < n_orig; ++j) {
    const double c = sgn * lp.objective()[j];
    const auto& mp = maps[j];
    switch (mp.kind) {
      case VarMap::Shift: cost2[mp.col] += c; break;
      case VarMap::Flip: cost2[mp.col] -= c; break;
      case VarMap::Split:
        cost2[mp.col] += c;
        cost2[mp.col2] -= c;
        break;
    }
  }
  if (run_simplex(t, cost2, allowed, sol.pivots) == LpStatus::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  Vec z(n_cols, 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) z[t.basis()[i]] = std::max(t.rhs(i), 0.0);
  sol.x.assign(n_orig, 0.0);
  for (std::size_t j = 0; j < n_orig; ++j) {
    const auto& mp = maps[j];
    switch (mp.kind) {
      case VarMap::Shift: sol.x[j] = mp.base + z[mp.col]; break;
      case VarMap::Flip: sol.x[j] = mp.base - z[mp.col]; break;
      case VarMap::Split: sol.x[j] = z[mp.col] - z[mp.col2]; break;
    }
  }
  sol.value = dot(lp.objective(), sol.x);
  sol.status = LpStatus::Optimal;
  return sol;
}

LpSolution solve_or_throw(const LpProblem& lp, const std::string& context) {
  LpSolution sol = solve(lp);
  if (sol.status != LpStatus::Optimal)
    throw std::runtime_error(context + ": LP " + to_string(sol.status));
  return sol;
}

}  // namespace palab
