#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "oracles.hpp"
#include "palab/constructions.hpp"
#include "palab/experiment.hpp"
#include "palab/learners.hpp"
#include "palab/presets.hpp"
#include "palab/solvers.hpp"

namespace palab::accept {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string num(double x) { return fmt("%.6g", x); }

// Detail text accumulates failures; the first few are kept.
struct Failures {
  std::size_t count = 0;
  std::string first;
  void add(const std::string& what) {
    if (count++ < 3) first += (first.empty() ? "" : "; ") + what;
  }
  bool ok() const { return count == 0; }
  std::string summary(const std::string& ok_text) const {
    return ok() ? ok_text : std::to_string(count) + " failure(s): " + first;
  }
};

Vec random_point_simplex(std::mt19937_64& rng, std::size_t d, double floor = 1e-3) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Vec x(d);
  double t = 0.0;
  for (auto& v : x) t += v = U(rng) + floor;
  for (auto& v : x) v /= t;
  return x;
}

Instance random_instance(std::mt19937_64& rng, std::size_t d, std::size_t n, bool box) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Instance inst;
  if (box) {
    Vec lo(d), hi(d);
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = U(rng);
      hi[i] = lo[i] + 0.2 + std::abs(U(rng));
    }
    inst.space = DecisionSpace::box(lo, hi);
  } else {
    inst.space = DecisionSpace::simplex(d);
  }
  for (std::size_t a = 0; a < n; ++a) inst.actions.push_back("a" + std::to_string(a));
  inst.n_signals = n + 1;
  inst.u_lin = Matrix(d, n);
  inst.v_lin = Matrix(d, n);
  inst.u_off.assign(n, 0.0);
  inst.v_off.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < d; ++i) {
      inst.u_lin(i, a) = U(rng);
      inst.v_lin(i, a) = U(rng);
    }
    if (box) {
      inst.u_off[a] = U(rng);
      inst.v_off[a] = U(rng);
    }
  }
  return inst;
}

Vec random_point(std::mt19937_64& rng, const DecisionSpace& space) {
  if (space.kind() == SpaceKind::Simplex) return random_point_simplex(rng, space.dim());
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Vec x(space.dim());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = space.lo()[i] + U(rng) * (space.hi()[i] - space.lo()[i]);
  return x;
}

PrincipalStrategy random_strategy(std::mt19937_64& rng, const DecisionSpace& space, std::size_t S) {
  std::uniform_real_distribution<double> U(0.05, 1.0);
  PrincipalStrategy pi;
  double tot = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    double w = U(rng);
    tot += w;
    pi.signals.push_back({w, random_point(rng, space)});
  }
  for (auto& s : pi.signals) s.prob /= tot;
  return pi;
}

AgentStrategy random_rho(std::mt19937_64& rng, std::size_t S, std::size_t n) {
  AgentStrategy rho;
  for (std::size_t s = 0; s < S; ++s) rho.rows.push_back(random_point_simplex(rng, n, 0.0));
  return rho;
}

// Per-signal min / max of u over actions within delta of the best at that signal.
double per_signal_enumeration(const Instance& inst, const PrincipalStrategy& pi, double delta, bool minimize) {
  double total = 0.0;
  for (const auto& sig : pi.signals) {
    double vmax = -1e300;
    for (std::size_t a = 0; a < inst.n_actions(); ++a) vmax = std::max(vmax, oracle::v_at(inst, sig.decision, a));
    double best = minimize ? 1e300 : -1e300;
    for (std::size_t a = 0; a < inst.n_actions(); ++a) {
      if (oracle::v_at(inst, sig.decision, a) < vmax - delta - 1e-12) continue;
      double u = oracle::u_at(inst, sig.decision, a);
      best = minimize ? std::min(best, u) : std::max(best, u);
    }
    total += sig.prob * best;
  }
  return total;
}

// ---- criteria ----

void crit_stackelberg(CriterionResult& r, const Options&) {
  double u1 = stackelberg_value(example_5_1(0.3).to_generalized()).value;
  double u2 = stackelberg_value(theorem_3_7_instance(0.04).to_generalized()).value;
  r.ok = std::abs(u1 - 0.6) <= 1e-9 && std::abs(u2) <= 1e-9;
  r.detail = "U*(example5_1, 0.3) = " + fmt("%.12g", u1) + ", U*(theorem_3_7, 0.04) = " + fmt("%.12g", u2);
}

void crit_gap(CriterionResult& r, const Options&) {
  auto inst = example_5_1(0.3).to_generalized();
  auto gap = inducibility_gap(inst);
  double grid = oracle::grid_inducibility_gap(inst, oracle::simplex_grid(2, 10000));
  Failures f;
  if (std::abs(gap.G - 1.0) > 1e-6) f.add("G = " + num(gap.G));
  if (std::abs(gap.G - grid) > 1e-6) f.add("grid oracle " + num(grid));
  if (gap.anchors.size() != 2) {
    f.add("expected 2 anchors");
  } else {
    // action a (index 0) is made optimal at Good, b at Bad
    if (std::abs(gap.anchors[0][0] - 1.0) > 1e-6) f.add("anchor(a) = " + num(gap.anchors[0][0]));
    if (std::abs(gap.anchors[1][1] - 1.0) > 1e-6) f.add("anchor(b) = " + num(gap.anchors[1][0]));
    for (std::size_t a = 0; a < 2; ++a) {
      double m = inst.v(gap.anchors[a], a) - inst.v(gap.anchors[a], 1 - a);
      if (m < gap.G - 1e-9) f.add("anchor margin " + num(m));
    }
  }
  r.ok = f.ok();
  r.detail = f.summary("G = " + fmt("%.9g", gap.G) + ", grid oracle " + fmt("%.9g", grid));
}

void crit_delta_br(CriterionResult& r, const Options&) {
  std::mt19937_64 rng(3);
  Failures f;
  std::size_t cases = 0;
  double worst = 0.0;
  for (std::size_t d = 1; d <= 3; ++d)
    for (std::size_t n = 1; n <= 3; ++n)
      for (int box = 0; box <= 1; ++box)
        for (int rep = 0; rep < 6; ++rep) {
          auto inst = random_instance(rng, d, n, box != 0);
          std::size_t S = 1 + static_cast<std::size_t>(rep) % 3;
          auto pi = random_strategy(rng, inst.space, S);
          std::vector<double> probs;
          std::vector<Vec> xs;
          for (const auto& s : pi.signals) {
            probs.push_back(s.prob);
            xs.push_back(s.decision);
          }
          for (double delta : {0.0, 0.01, 0.1, 0.5}) {
            ++cases;
            const double diffs[4] = {
                worst_case_delta_br(inst, pi, delta, true).value - oracle::delta_br_vertices(inst, probs, xs, delta, true),
                best_case_delta_br(inst, pi, delta, true).value - oracle::delta_br_vertices(inst, probs, xs, delta, false),
                worst_case_delta_br(inst, pi, delta, false).value - per_signal_enumeration(inst, pi, delta, true),
                best_case_delta_br(inst, pi, delta, false).value - per_signal_enumeration(inst, pi, delta, false)};
            for (double e : diffs) {
              worst = std::max(worst, std::abs(e));
              if (std::abs(e) > 1e-6)
                f.add("d=" + std::to_string(d) + " |A|=" + std::to_string(n) + " delta=" + num(delta) + " off by " + num(e));
            }
          }
        }
  r.ok = f.ok();
  r.detail = f.summary(std::to_string(cases) + " (instance, delta) cases, max deviation " + num(worst));
}

void crit_sandwich(CriterionResult& r, const Options&) {
  Failures f;
  std::string vals;
  SearchBudget budget;
  budget.grid = 1000;
  for (double mu0 : {0.1, 0.3}) {
    auto inst = example_5_1(mu0).to_generalized();
    for (double delta : {0.005, 0.02}) {
      auto set = search_objectives(inst, delta, budget);
      double upper = 2 * mu0 - 2 * std::sqrt(2 * mu0 * delta) + delta;
      double lower = 2 * mu0 + delta;
      if (set.method != "grid") f.add("search did not use the grid");
      if (set.under_r.value > upper + 1e-6) f.add("under_r(" + num(mu0) + "," + num(delta) + ") = " + num(set.under_r.value));
      if (set.over_r.value < lower - 2e-3) f.add("over_r(" + num(mu0) + "," + num(delta) + ") = " + num(set.over_r.value));
      vals += (vals.empty() ? "" : " ") + fmt("%.4f", set.under_r.value) + "<=" + fmt("%.4f", upper) + "," +
              fmt("%.4f", set.over_r.value) + ">=" + fmt("%.4f", lower);
    }
  }
  r.ok = f.ok();
  r.detail = f.summary(vals);
}

void crit_chain(CriterionResult& r, const Options&) {
  Failures f;
  std::size_t checked = 0;
  SearchBudget budget;
  budget.grid = 100;
  budget.samples = 60;
  budget.refine = 15;
  auto check = [&](const std::string& label, const Instance& inst) {
    for (double delta : {0.0, 0.01, 0.1}) {
      auto s = search_objectives(inst, delta, budget);
      const double tol = 1e-9;
      ++checked;
      bool chain = s.under_r.value <= s.under_d.value + tol && s.under_d.value <= s.U_star + tol &&
                   s.U_star <= s.over_d.value + tol && s.over_d.value <= s.over_r.value + tol;
      if (!chain)
        f.add(label + " delta=" + num(delta) + ": " + num(s.under_r.value) + " " + num(s.under_d.value) + " " +
              num(s.U_star) + " " + num(s.over_d.value) + " " + num(s.over_r.value));
    }
  };
  for (const auto& name : preset_names()) check(name, generalized(load_preset(name)));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    std::size_t d = 2 + i % 2, n = 2 + (i / 2) % 2;
    bool box = i % 5 == 4;
    auto inst = random_instance(rng, d, n, box);
    if (!box && i % 3 == 0) inst.mean = random_point_simplex(rng, d, 0.2);
    check("random#" + std::to_string(i), inst);
  }
  r.ok = f.ok();
  r.detail = f.summary(std::to_string(checked) + " (instance, delta) chains hold");
}

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

void crit_sublinear(CriterionResult& r, const Options& opt) {
  SimConfig cfg;
  cfg.instance = example_5_1(0.3);
  cfg.policy.kind = "stackelberg";
  cfg.learner.kind = "exp3";
  cfg.learner.feedback = FeedbackMode::Bandit;
  cfg.replicas = 20;
  cfg.seed = 1;
  std::vector<double> Ts, medians, cregs;
  for (std::uint64_t T : {std::uint64_t{1} << 12, std::uint64_t{1} << 14, std::uint64_t{1} << 16}) {
    cfg.T = T;
    auto rs = run_replicas(cfg, opt.workers);
    Ts.push_back(static_cast<double>(T));
    cregs.push_back(rs.creg.median);
    medians.push_back(rs.creg.median / static_cast<double>(T));
  }
  bool decreasing = medians[0] > medians[1] && medians[1] > medians[2];
  double slope = loglog_slope(Ts, cregs);
  r.ok = decreasing && slope >= 0.4 && slope <= 0.75;
  r.detail = "median creg/T " + num(medians[0]) + " > " + num(medians[1]) + " > " + num(medians[2]) +
             (decreasing ? "" : " (not decreasing)") + ", slope " + fmt("%.3f", slope);
}

ExperimentResult run_shipped(const Options& opt, const std::string& name, ExperimentSpec* spec_out = nullptr) {
  auto spec = load_experiment(opt.root / "experiments" / (name + ".json"));
  auto res = run_experiment(spec, opt.workers);
  if (spec_out) *spec_out = spec;
  return res;
}

std::string describe_checks(const ExperimentResult& res) {
  std::string out;
  for (const auto& cell : res.cells)
    for (const auto& c : cell.checks) {
      out += (out.empty() ? "" : "; ") + c.bound_name + ": " + num(c.lhs) + (c.check == Check::LowerBound ? " >= " : " <= ") +
             num(c.rhs) + (c.check == Check::LowerBound ? " - " : " + ") + "slack, delta " + num(c.delta) +
             (c.pass ? "" : " FAILED") + (c.note.empty() ? "" : " (" + c.note + ")");
    }
  return out;
}

void crit_experiment_bound(CriterionResult& r, const Options& opt, const std::string& name) {
  auto res = run_shipped(opt, name);
  bool any = false;
  for (const auto& cell : res.cells) any = any || !cell.checks.empty();
  r.ok = any && res.all_checks_pass();
  r.detail = describe_checks(res);
}

void crit_mean_based(CriterionResult& r, const Options& opt) {
  auto res = run_shipped(opt, "criterion9");
  Failures f;
  std::string vals;
  for (const auto& cell : res.cells) {
    const auto& st = cell.summary.avg_u;
    double U = res.analysis.U_star;
    if (st.mean < 0.25) f.add("mean u " + num(st.mean) + " < 0.25");
    if (!(st.mean > U + 10.0 * st.se)) f.add("mean u " + num(st.mean) + " not above U* + 10 se");
    vals += "mean u " + num(st.mean) + " (se " + num(st.se) + ", U* " + num(U) + ")";
  }
  r.ok = f.ok() && !res.cells.empty();
  r.detail = f.ok() ? vals : f.summary("") + "; " + vals;
}

void crit_constructions(CriterionResult& r, const Options&) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Failures f;
  int pairs = 0;
  double worst_margin = 0.0;
  while (pairs < 50) {
    std::size_t d = 2 + pairs % 2, n = 2 + (pairs / 2) % 2;
    auto inst = random_instance(rng, d, n, false);
    auto pi = random_strategy(rng, inst.space, 1 + pairs % 3);
    if (pairs % 2 == 1) {
      // constrained: the strategy's own mean is the required one
      Vec m = pi.mean();
      if (*std::min_element(m.begin(), m.end()) < 0.05) continue;
      inst.mean = m;
    }
    auto an = analyze(inst);
    if (!(an.G > 0.05)) continue;
    auto rho = random_rho(rng, pi.size(), n);
    const double delta = best_agent_value(inst, pi) - agent_utility(inst, pi, rho);  // rho is in R_delta
    ++pairs;

    auto e = embed_exact_br(inst, an, pi, rho);
    validate_strategy(inst, e.pi);
    for (std::size_t s = 0; s < e.pi.size(); ++s) {
      const auto& x = e.pi.signals[s].decision;
      Vec vals = inst.v_all(x);
      double vmax = *std::max_element(vals.begin(), vals.end());
      for (std::size_t a = 0; a < n; ++a)
        if (e.rho.rows[s][a] > 0.0) {
          worst_margin = std::min(worst_margin, vals[a] - vmax);
          if (vals[a] - vmax < -1e-9) f.add("pair " + std::to_string(pairs) + ": embedded margin " + num(vals[a] - vmax));
        }
    }
    double before = principal_utility(inst, pi, rho);
    double after = principal_utility(inst, e.pi, e.rho);
    double allowed = perturbation_constant(an) * delta / an.G + 1e-6;
    if (after < before - allowed) f.add("pair " + std::to_string(pairs) + ": embedding lost " + num(before - after));

    double Delta = 0.05 + 0.5 * U(rng);
    auto filt = filter_to_delta_optimal(inst, pi, rho, Delta);
    double shift = std::abs(principal_utility(inst, pi, filt.rho) - before);
    if (shift > 2.0 * an.B * delta / Delta + 1e-9)
      f.add("pair " + std::to_string(pairs) + ": filter shift " + num(shift) + " > " + num(2.0 * an.B * delta / Delta));
  }
  r.ok = f.ok();
  r.detail = f.summary("50 pairs, worst embedded margin " + num(worst_margin));
}

void crit_static_agents(CriterionResult& r, const Options&) {
  Failures f;
  auto inst = example_5_1(0.3).to_generalized();
  auto pi = stackelberg_value(inst).pi;
  StaticParams q;
  q.kind = StaticKind::Quantal;
  q.lambda = 100.0;
  auto rho = static_agent(inst, pi, q);
  double gap = best_agent_value(inst, pi) - agent_utility(inst, pi, rho);
  double cap = (1.0 + std::log(2.0 * 100.0)) / 100.0;
  if (gap > cap) f.add("quantal gap " + num(gap) + " > " + num(cap));

  std::mt19937_64 rng(13);
  std::size_t rows = 0;
  std::vector<Instance> insts = {inst, theorem_3_7_instance(0.01).to_generalized()};
  for (int i = 0; i < 10; ++i) insts.push_back(random_instance(rng, 2 + i % 2, 2 + (i / 2) % 2, false));
  for (const auto& g : insts)
    for (double eps : {0.0, 0.01, 0.05, 0.1, 0.3}) {
      auto p = random_strategy(rng, g.space, 4);
      StaticParams ib;
      ib.kind = StaticKind::InaccurateBelief;
      ib.epsilon = eps;
      auto rr = static_agent(g, p, ib);
      for (std::size_t s = 0; s < p.size(); ++s) {
        auto set = best_response_set(g, p.signals[s].decision, 2.0 * eps);
        for (std::size_t a = 0; a < g.n_actions(); ++a)
          if (rr.rows[s][a] > 0.0 && std::find(set.begin(), set.end(), a) == set.end())
            f.add("inaccurate belief eps=" + num(eps) + " plays an action outside D_2eps");
        ++rows;
      }
    }
  r.ok = f.ok();
  r.detail = f.summary("quantal gap " + num(gap) + " <= " + num(cap) + ", " + std::to_string(rows) +
                       " inaccurate-belief rows inside D_2eps");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void crit_determinism(CriterionResult& r, const Options& opt) {
  Failures f;
  std::size_t files = 0, specs = 0;
  const fs::path scratch = fs::temp_directory_path() / "palab_determinism";
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(opt.root / "experiments"))
    if (e.path().extension() == ".json") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& path : paths) {
    auto spec = load_experiment(path);
    for (auto& T : spec.T_list) T = std::min<std::uint64_t>(T, 4096);
    spec.seeds.resize(std::min<std::size_t>(spec.seeds.size(), 2));
    spec.base.replicas = std::min<std::size_t>(spec.base.replicas, 2);
    spec.outputs.rounds_csv = true;
    ++specs;
    std::vector<fs::path> dirs;
    for (std::size_t run = 0; run < 2; ++run) {
      fs::path dir = scratch / (spec.name + "_" + std::to_string(run));
      fs::remove_all(dir);
      // the second run uses one worker to also rule out scheduling effects
      auto res = run_experiment(spec, run == 0 ? opt.workers : 1);
      write_experiment_outputs(spec, res, dir);
      dirs.push_back(dir);
    }
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      fs::path other = dirs[1] / e.path().filename();
      if (!fs::exists(other) || slurp(e.path()) != slurp(other)) f.add(spec.name + "/" + e.path().filename().string() + " differs");
    }
  }
  fs::remove_all(scratch);
  r.ok = f.ok() && files > 0;
  r.detail = f.summary(std::to_string(files) + " CSV files from " + std::to_string(specs) + " specs byte-identical");
}

}  // namespace

const std::vector<CriterionInfo>& criteria() {
  static const std::vector<CriterionInfo> list = {
      {1, "Stackelberg values of the presets", 1.0},
      {2, "inducibility gap and anchors vs grid oracle", 1.0},
      {3, "delta best-response LPs vs brute force", 30.0},
      {4, "two-state example analytic sandwich", 120.0},
      {5, "objective chain on presets and random instances", 120.0},
      {6, "Exp3 contextual regret is sublinear", 120.0},
      {7, "robust fixed scheme meets the regret lower bound", 300.0},
      {8, "adaptive principal is capped by swap regret", 600.0},
      {9, "mean-based agent is exploitable", 300.0},
      {10, "embedding and filtering guarantees", 60.0},
      {11, "quantal and inaccurate-belief agents", 10.0},
      {12, "experiment CSVs are deterministic", 60.0},
  };
  return list;
}

CriterionResult run_criterion(int id, const Options& opt) {
  const auto& list = criteria();
  auto it = std::find_if(list.begin(), list.end(), [&](const CriterionInfo& c) { return c.id == id; });
  if (it == list.end()) throw std::out_of_range("no criterion " + std::to_string(id));
  CriterionResult r;
  r.info = *it;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: crit_stackelberg(r, opt); break;
      case 2: crit_gap(r, opt); break;
      case 3: crit_delta_br(r, opt); break;
      case 4: crit_sandwich(r, opt); break;
      case 5: crit_chain(r, opt); break;
      case 6: crit_sublinear(r, opt); break;
      case 7: crit_experiment_bound(r, opt, "criterion7"); break;
      case 8: crit_experiment_bound(r, opt, "criterion8"); break;
      case 9: crit_mean_based(r, opt); break;
      case 10: crit_constructions(r, opt); break;
      case 11: crit_static_agents(r, opt); break;
      case 12: crit_determinism(r, opt); break;
    }
  } catch (const std::exception& e) {
    r.ok = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

CriterionResult run_negative_control(const Options& opt) {
  CriterionResult r;
  r.info = {0, "lower bound on a misspecified agent (expected to fail)", 60.0};
  const auto start = std::chrono::steady_clock::now();
  try {
    crit_experiment_bound(r, opt, "negative_control");
  } catch (const std::exception& e) {
    r.ok = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string format_line(const CriterionResult& r) {
  std::string head = r.pass() ? "PASS" : "FAIL";
  std::string id = r.info.id == 0 ? "negative control" : "criterion " + std::to_string(r.info.id);
  std::string time = fmt("%.2f", r.seconds) + "s/" + fmt("%.0f", r.info.limit_seconds) + "s";
  if (r.ok && !r.pass()) time += " over time limit";
  return head + "  " + id + ": " + r.info.title + " [" + time + "] " + r.detail;
}

}  // namespace palab::accept
