#include <cmath>
#include <sstream>
#include <stdexcept>

#include "palab/solvers.hpp"

namespace palab {

Example51Analytic example51_analytic(double mu0, double delta) {
  if (!(mu0 > 0.0 && mu0 < 0.5)) throw std::invalid_argument("example51_analytic: mu0 must lie in (0, 0.5)");
  if (!(delta >= 0.0)) throw std::invalid_argument("example51_analytic: delta must be >= 0");
  if (!(delta < mu0 / 2.0)) throw std::invalid_argument("example51_analytic: under bound needs delta < mu0/2");
  if (!(delta < 1.0 - 2.0 * mu0)) throw std::invalid_argument("example51_analytic: over bound needs delta < 1 - 2 mu0");
  const double u = 2.0 * mu0;
  return {u - 2.0 * std::sqrt(2.0 * mu0 * delta) + delta, u + delta, u};
}

const Bound* BoundSet::find(const std::string& name) const {
  for (const auto& b : bounds)
    if (b.name == name) return &b;
  return nullptr;
}

const Bound& BoundSet::at(const std::string& name) const {
  if (const Bound* b = find(name)) return *b;
  throw std::out_of_range("no bound named '" + name + "'");
}

namespace {

std::string range_note(const char* what, double limit) {
  std::ostringstream os;
  os << "needs delta < " << limit << " (" << what << ")";
  return os.str();
}

}  // namespace

BoundSet theorem_bounds(const InstanceAnalysis& an, double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("theorem_bounds: delta must be >= 0");
  BoundSet out;
  out.delta = delta;
  const double U = an.U_star, G = an.G, B = an.B, L = an.L, D = an.diam;
  const bool gap_ok = G > 0.0;
  auto add = [&](std::string name, double value, bool in_range, std::string note) {
    bool ok = gap_ok && in_range;
    if (!gap_ok) note = "G <= 0: some action is weakly dominated";
    if (ok) note.clear();
    out.bounds.push_back({std::move(name), value, ok, std::move(note)});
  };
  // With an infinite gap (single action) every bound collapses to U*.
  const double ratio = std::isinf(G) ? 0.0 : delta / G;

  if (!an.constrained) {
    add("unconstrained.under_d", U - D * L * ratio, delta < G, range_note("G", G));
    double lim = D * G * L / (2.0 * B);
    add("unconstrained.under_r", U - 2.0 * std::sqrt(2.0 * B * L * D * ratio), delta < lim, range_note("diam G L / 2B", lim));
    add("unconstrained.over", U + D * L * ratio, delta < G, range_note("G", G));
  } else {
    const double dist = *an.dist;
    const double K = D * L + 2.0 * B * D / dist;
    const double lim = dist * G / D;
    add("constrained.under_d", U - K * ratio, delta < lim, range_note("dist G / diam", lim));
    add("constrained.under_r", U - 2.0 * std::sqrt(2.0 * B * K * ratio), delta < lim, range_note("dist G / diam", lim));
    add("constrained.over", U + K * ratio, delta < lim, range_note("dist G / diam", lim));
  }

  const std::string& fam = an.family.family;
  if (fam == "persuasion") {
    const double p0 = an.family.p0;
    const double c = 1.0 + 2.0 / p0;
    const double lim = G * p0 / 2.0;
    add("persuasion.under_d", U - 2.0 * B * c * ratio, delta < lim, range_note("G p0 / 2", lim));
    add("persuasion.under_r", U - 4.0 * B * std::sqrt(c * ratio), delta < lim, range_note("G p0 / 2", lim));
    add("persuasion.over", U + 2.0 * B * c * ratio, delta < lim, range_note("G p0 / 2", lim));
  } else if (fam == "stackelberg") {
    add("stackelberg.under_r", U - 4.0 * B * std::sqrt(ratio), delta < G, range_note("G", G));
    add("stackelberg.over", U + 2.0 * B * ratio, delta < G, range_note("G", G));
  } else if (fam == "contract_box") {
    const double R = an.family.R, P = an.family.P;
    const double lim = P * G / (2.0 * (R + P));
    add("contract_box.under_r", U - 2.0 * std::sqrt(2.0 * (R + P) * P * ratio), delta < lim,
        range_note("P G / 2(R+P)", lim));
    add("contract_box.over", U + P * ratio, delta < G, range_note("G", G));
  } else if (fam == "contract_expected") {
    const double R = an.family.R;
    // diam = R, L = 1, B = 2R gives the range diam G L / 2B = G / 4.
    add("contract_expected.under_r", U - 4.0 * R * std::sqrt(ratio), delta < G / 4.0, range_note("G / 4", G / 4.0));
    add("contract_expected.over", U + R * ratio, delta < G, range_note("G", G));
  }
  return out;
}

double filtering_bound(double under_d_at_Delta, double B, double delta, double Delta) {
  if (!(Delta > 0.0)) throw std::invalid_argument("filtering_bound: Delta must be positive");
  return under_d_at_Delta - 2.0 * B * delta / Delta;
}

}  // namespace palab
