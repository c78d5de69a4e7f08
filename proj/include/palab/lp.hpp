#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "palab/linalg.hpp"

namespace palab {

enum class Sense { Le, Ge, Eq };
enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LpRow {
  Vec coeffs;
  Sense sense = Sense::Le;
  double rhs = 0.0;
};

// Dense LP: optimize objective . x subject to rows and lower <= x <= upper.
// Variables default to [0, +inf).
class LpProblem {
 public:
  explicit LpProblem(std::size_t n_vars, bool maximize = true);

  std::size_t n_vars() const { return objective_.size(); }
  bool maximize() const { return maximize_; }

  void set_objective(std::size_t j, double c) { objective_.at(j) = c; }
  void set_objective(Vec c);
  void set_bounds(std::size_t j, double lo, double hi);
  void add_row(Vec coeffs, Sense sense, double rhs);

  const Vec& objective() const { return objective_; }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  const std::vector<LpRow>& rows() const { return rows_; }

  // Largest violation of any row or bound at x.
  double max_violation(const Vec& x) const;

 private:
  bool maximize_;
  Vec objective_;
  Vec lower_;
  Vec upper_;
  std::vector<LpRow> rows_;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vec x;
  double value = 0.0;
  std::size_t pivots = 0;
};

// Two-phase primal simplex with Bland's anti-cycling rule. Redundant equality
// rows are detected and dropped after phase one.
LpSolution solve(const LpProblem& lp);

// Solves and throws std::runtime_error unless the status is Optimal.
LpSolution solve_or_throw(const LpProblem& lp, const std::string& context);

}  // namespace palab
