#include "palab/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace palab {

const char* to_string(Norm n) { return n == Norm::L1 ? "l1" : "linf"; }

DecisionSpace DecisionSpace::simplex(std::size_t d) {
  if (d == 0) throw std::invalid_argument("simplex dimension must be positive");
  DecisionSpace s;
  s.kind_ = SpaceKind::Simplex;
  s.dim_ = d;
  s.lo_.assign(d, 0.0);
  s.hi_.assign(d, 1.0);
  return s;
}

DecisionSpace DecisionSpace::box(Vec lo, Vec hi) {
  if (lo.empty()) throw std::invalid_argument("box dimension must be positive");
  if (lo.size() != hi.size()) throw DimensionError("box bounds", lo.size(), hi.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      throw std::invalid_argument("box bounds must be finite");
    if (lo[i] > hi[i]) throw std::invalid_argument("box requires lo <= hi componentwise");
  }
  DecisionSpace s;
  s.kind_ = SpaceKind::Box;
  s.dim_ = lo.size();
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

bool DecisionSpace::contains(std::span<const double> x, double tol) const {
  if (x.size() != dim_) return false;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (!std::isfinite(x[i])) return false;
    if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) return false;
  }
  if (kind_ == SpaceKind::Simplex && std::abs(sum(x) - 1.0) > tol) return false;
  return true;
}

double DecisionSpace::diameter(Norm norm) const {
  if (kind_ == SpaceKind::Simplex) {
    if (dim_ == 1) return 0.0;
    return norm == Norm::L1 ? 2.0 : 1.0;
  }
  double l1 = 0.0, linf = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    l1 += hi_[i] - lo_[i];
    linf = std::max(linf, hi_[i] - lo_[i]);
  }
  return norm == Norm::L1 ? l1 : linf;
}

double DecisionSpace::boundary_distance(std::span<const double> c) const {
  if (c.size() != dim_) throw DimensionError("space dimension", dim_, c.size());
  if (kind_ == SpaceKind::Simplex) {
    if (dim_ == 1) return std::numeric_limits<double>::infinity();
    return 2.0 * *std::min_element(c.begin(), c.end());
  }
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dim_; ++i) d = std::min({d, c[i] - lo_[i], hi_[i] - c[i]});
  return d;
}

double DecisionSpace::exit_time(std::span<const double> from, std::span<const double> dir) const {
  if (from.size() != dim_) throw DimensionError("space dimension", dim_, from.size());
  if (dir.size() != dim_) throw DimensionError("space dimension", dim_, dir.size());
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dim_; ++i) {
    if (dir[i] < 0.0) t = std::min(t, (from[i] - lo_[i]) / -dir[i]);
    if (kind_ == SpaceKind::Box && dir[i] > 0.0) t = std::min(t, (hi_[i] - from[i]) / dir[i]);
  }
  return std::max(t, 0.0);
}

std::vector<Vec> DecisionSpace::vertices() const {
  std::vector<Vec> out;
  if (kind_ == SpaceKind::Simplex) {
    for (std::size_t i = 0; i < dim_; ++i) {
      Vec e(dim_, 0.0);
      e[i] = 1.0;
      out.push_back(std::move(e));
    }
    return out;
  }
  if (dim_ > 20) throw std::invalid_argument("box vertex enumeration limited to 20 dimensions");
  for (std::size_t mask = 0; mask < (std::size_t{1} << dim_); ++mask) {
    Vec v(dim_);
    for (std::size_t i = 0; i < dim_; ++i) v[i] = (mask >> i) & 1 ? hi_[i] : lo_[i];
    out.push_back(std::move(v));
  }
  return out;
}

Vec DecisionSpace::center() const {
  Vec c(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    c[i] = kind_ == SpaceKind::Simplex ? 1.0 / static_cast<double>(dim_) : 0.5 * (lo_[i] + hi_[i]);
  return c;
}

double DecisionSpace::min_affine(std::span<const double> lin, double off) const {
  if (lin.size() != dim_) throw DimensionError("space dimension", dim_, lin.size());
  if (kind_ == SpaceKind::Simplex) return off + *std::min_element(lin.begin(), lin.end());
  double s = off;
  for (std::size_t i = 0; i < dim_; ++i) s += std::min(lin[i] * lo_[i], lin[i] * hi_[i]);
  return s;
}

double DecisionSpace::max_affine(std::span<const double> lin, double off) const {
  if (lin.size() != dim_) throw DimensionError("space dimension", dim_, lin.size());
  if (kind_ == SpaceKind::Simplex) return off + *std::max_element(lin.begin(), lin.end());
  double s = off;
  for (std::size_t i = 0; i < dim_; ++i) s += std::max(lin[i] * lo_[i], lin[i] * hi_[i]);
  return s;
}

Vec DecisionSpace::clamp(std::span<const double> x) const {
  if (x.size() != dim_) throw DimensionError("space dimension", dim_, x.size());
  Vec out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = std::clamp(x[i], lo_[i], hi_[i]);
  if (kind_ == SpaceKind::Simplex) {
    double s = sum(out);
    if (s <= 0.0) return center();
    for (double& v : out) v /= s;
  }
  return out;
}

}  // namespace palab
