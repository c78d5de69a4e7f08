#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "palab/linalg.hpp"

namespace palab {

enum class SpaceKind { Simplex, Box };
enum class Norm { L1, Linf };

const char* to_string(Norm n);

// Convex compact decision space of the principal: the probability simplex
// (beliefs, mixed strategies) or an axis-aligned box (payments).
class DecisionSpace {
 public:
  static DecisionSpace simplex(std::size_t d);
  static DecisionSpace box(Vec lo, Vec hi);

  SpaceKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }

  // Simplex pairs with l1 (beliefs), box with l-infinity (payments).
  Norm natural_norm() const { return kind_ == SpaceKind::Simplex ? Norm::L1 : Norm::Linf; }

  bool contains(std::span<const double> x, double tol = 1e-9) const;
  double diameter(Norm norm) const;

  // Distance from c to the relative boundary, in the natural norm. For the
  // simplex under l1 this is 2 * min_i c_i: reaching a facet means moving
  // all of c_i's mass elsewhere.
  double boundary_distance(std::span<const double> c) const;

  // Largest t >= 0 with from + t * dir still feasible; +inf if the ray never
  // leaves. dir must keep the simplex sum fixed (sum(dir) == 0).
  double exit_time(std::span<const double> from, std::span<const double> dir) const;

  std::vector<Vec> vertices() const;
  Vec center() const;

  // Exact extrema of off + x . lin over the space.
  double min_affine(std::span<const double> lin, double off) const;
  double max_affine(std::span<const double> lin, double off) const;

  // Projection of x into the space (clip for box, clip-and-renormalize for
  // the simplex). Only used to scrub round-off.
  Vec clamp(std::span<const double> x) const;

 private:
  SpaceKind kind_ = SpaceKind::Simplex;
  std::size_t dim_ = 0;
  Vec lo_;
  Vec hi_;
};

}  // namespace palab
