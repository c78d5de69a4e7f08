#pragma once

#include "palab/instance.hpp"
#include "palab/lp.hpp"

namespace palab::detail {

// Rows making (y, p) a lifted signal, y = p * x with x in the space. y
// occupies columns [y0, y0 + d), p is column p_idx.
inline void add_lifted_space_rows(LpProblem& lp, const DecisionSpace& space, std::size_t y0, std::size_t p_idx) {
  const std::size_t d = space.dim(), n = lp.n_vars();
  if (space.kind() == SpaceKind::Simplex) {
    Vec row(n, 0.0);
    for (std::size_t i = 0; i < d; ++i) row[y0 + i] = 1.0;
    row[p_idx] = -1.0;
    lp.add_row(std::move(row), Sense::Eq, 0.0);
    return;
  }
  for (std::size_t i = 0; i < d; ++i) {
    lp.set_bounds(y0 + i, -kInf, kInf);
    Vec up(n, 0.0), down(n, 0.0);
    up[y0 + i] = 1.0;
    up[p_idx] = -space.hi()[i];
    down[y0 + i] = 1.0;
    down[p_idx] = -space.lo()[i];
    lp.add_row(std::move(up), Sense::Le, 0.0);
    lp.add_row(std::move(down), Sense::Ge, 0.0);
  }
}

// Sum of probabilities is one and, when constrained, the lifted decisions
// average to the mean.
inline void add_lifted_mean_rows(LpProblem& lp, const Instance& inst, std::size_t n_signals,
                                 std::size_t stride, std::size_t p_offset) {
  const std::size_t d = inst.dim(), n = lp.n_vars();
  Vec total(n, 0.0);
  for (std::size_t s = 0; s < n_signals; ++s) total[s * stride + p_offset] = 1.0;
  lp.add_row(std::move(total), Sense::Eq, 1.0);
  if (!inst.mean) return;
  for (std::size_t i = 0; i < d; ++i) {
    Vec row(n, 0.0);
    for (std::size_t s = 0; s < n_signals; ++s) row[s * stride + i] = 1.0;
    lp.add_row(std::move(row), Sense::Eq, (*inst.mean)[i]);
  }
}

}  // namespace palab::detail
