#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acceptance.hpp"
#include "palab/constructions.hpp"
#include "palab/experiment.hpp"
#include "palab/io.hpp"
#include "palab/presets.hpp"
#include "palab/solvers.hpp"

#ifndef PALAB_SOURCE_DIR
#define PALAB_SOURCE_DIR "."
#endif

using namespace palab;
namespace fs = std::filesystem;

namespace {

// Usage or input problems; exit code 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string vec_str(const Vec& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + g(v[i]);
  return s + "]";
}

struct InstanceArgs {
  std::string preset;
  std::string path;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "preset, e.g. example5_1:mu0=0.3");
    cmd->add_option("--instance", path, "instance JSON file");
  }

  AnyInstance load(std::string* label) const {
    if (preset.empty() == path.empty()) throw UsageError("give exactly one of --preset or --instance");
    if (!preset.empty()) {
      *label = preset;
      return load_preset(preset);
    }
    *label = path;
    return load_instance_file(path);
  }
};

void print_strategy(const Instance& inst, const PrincipalStrategy& pi, const AgentStrategy* rho) {
  for (std::size_t s = 0; s < pi.size(); ++s) {
    std::cout << "  signal " << s << ": prob " << g(pi.signals[s].prob) << ", decision " << vec_str(pi.signals[s].decision);
    if (rho) std::cout << ", response " << vec_str(rho->rows[s]);
    std::cout << "\n";
  }
  (void)inst;
}

int cmd_analyze(const InstanceArgs& ia, const std::vector<double>& deltas, const std::string& emit) {
  std::string label;
  AnyInstance any = ia.load(&label);
  Instance inst = generalized(any);
  if (!emit.empty()) save_instance_file(emit, any);
  auto an = analyze(inst);
  std::cout << "instance: " << label << "\n";
  std::cout << "family: " << an.family.family << "\n";
  std::cout << "dim " << inst.dim() << ", actions " << inst.n_actions() << ", signals " << inst.n_signals
            << ", constrained " << (an.constrained ? "yes" : "no") << "\n";
  std::cout << "U* = " << g(an.U_star) << "\n";
  std::cout << "G = " << g(an.G) << "\n";
  if (!(an.G > 0.0)) std::cout << "G <= 0: some action is weakly dominated, so the perturbation bounds do not apply\n";
  std::cout << "B = " << g(an.B) << "\n";
  std::cout << "L = " << g(an.L) << "\n";
  std::cout << "diam = " << g(an.diam) << " (" << to_string(an.norm) << ")\n";
  if (an.dist) std::cout << "dist = " << g(*an.dist) << "\n";
  if (an.family.family == "persuasion") std::cout << "p0 = " << g(an.family.p0) << "\n";
  for (std::size_t a = 0; a < an.anchors.size(); ++a)
    std::cout << "anchor " << inst.actions[a] << " = " << vec_str(an.anchors[a]) << "\n";
  std::cout << "optimal strategy:\n";
  print_strategy(inst, an.witness.pi, &an.witness.rho);
  for (double delta : deltas) {
    auto bs = theorem_bounds(an, delta);
    std::cout << "bounds at delta = " << g(delta) << ":\n";
    for (const auto& b : bs.bounds) {
      std::cout << "  " << b.name << " = " << g(b.value);
      if (!b.applicable) std::cout << " (inapplicable" << (b.note.empty() ? "" : ": " + b.note) << ")";
      std::cout << "\n";
    }
  }
  return 0;
}

SearchBudget parse_budget(const std::string& text) {
  SearchBudget b;
  if (text.empty()) return b;
  auto to_count = [&](const std::string& s) -> std::uint64_t {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || s.empty()) throw UsageError("bad budget value '" + s + "'");
    return v;
  };
  if (text.find('=') == std::string::npos) {
    b.grid = b.samples = to_count(text);
    return b;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("bad budget item '" + item + "'");
    std::string key = item.substr(0, eq);
    std::uint64_t v = to_count(item.substr(eq + 1));
    if (key == "grid") b.grid = v;
    else if (key == "samples") b.samples = v;
    else if (key == "refine") b.refine = v;
    else if (key == "seed") b.seed = v;
    else throw UsageError("unknown budget key '" + key + "'");
  }
  return b;
}

int cmd_objectives(const InstanceArgs& ia, const std::vector<double>& deltas, const std::string& budget_text,
                   bool show_certificates) {
  std::string label;
  Instance inst = generalized(ia.load(&label));
  SearchBudget budget = parse_budget(budget_text);
  std::cout << "instance: " << label << "\n";
  for (double delta : deltas) {
    auto s = search_objectives(inst, delta, budget);
    std::cout << "delta = " << g(delta) << " (" << s.method << ", " << s.candidates << " candidates)\n";
    std::cout << "  under_r = " << g(s.under_r.value) << "\n";
    std::cout << "  under_d = " << g(s.under_d.value) << "\n";
    std::cout << "  U*      = " << g(s.U_star) << "\n";
    std::cout << "  over_d  = " << g(s.over_d.value) << "\n";
    std::cout << "  over_r  = " << g(s.over_r.value) << "\n";
    if (show_certificates)
      for (Objective o : {Objective::UnderR, Objective::UnderD, Objective::OverD, Objective::OverR}) {
        std::cout << "  certificate " << to_string(o) << ":\n";
        print_strategy(inst, s.get(o).pi, &s.get(o).rho);
      }
  }
  return 0;
}

int cmd_construct(const InstanceArgs& ia, double delta, double epsilon, double Delta) {
  std::string label;
  Instance inst = generalized(ia.load(&label));
  auto an = analyze(inst);
  std::cout << "instance: " << label << "\n";
  std::cout << "U* = " << g(an.U_star) << ", G = " << g(an.G) << "\n";

  auto rs = build_robust_scheme(inst, an, an.witness.pi, an.witness.rho, delta, epsilon);
  auto worst = worst_case_delta_br(inst, rs.pi, delta, false);
  std::cout << "robust scheme at delta = " << g(delta) << ": theta " << g(rs.params.theta) << ", eta "
            << g(rs.params.eta) << ", epsilon " << g(rs.params.epsilon) << (rs.expanded ? ", expanded" : "") << "\n";
  print_strategy(inst, rs.pi, nullptr);
  std::cout << "  worst deterministic delta-response utility = " << g(worst.value) << "\n";

  // The worst randomized delta-response to the optimum, then both repairs.
  auto adv = worst_case_delta_br(inst, an.witness.pi, delta, true);
  double loss = best_agent_value(inst, an.witness.pi) - agent_utility(inst, an.witness.pi, adv.rho);
  std::cout << "worst randomized delta-response to the optimum: utility " << g(adv.value) << ", agent loss "
            << g(loss) << "\n";
  auto e = embed_exact_br(inst, an, an.witness.pi, adv.rho);
  std::cout << "exact best-response embedding: " << e.pi.size() << " signals, eta " << g(e.eta) << ", utility "
            << g(principal_utility(inst, e.pi, e.rho)) << "\n";
  print_strategy(inst, e.pi, &e.rho);
  auto f = filter_to_delta_optimal(inst, an.witness.pi, adv.rho, Delta);
  double shifted = principal_utility(inst, an.witness.pi, f.rho);
  std::cout << "filtered onto Delta = " << g(Delta) << " optimal actions: utility " << g(shifted) << ", shift "
            << g(std::abs(shifted - adv.value)) << ", cap " << g(2.0 * an.B * loss / Delta) << "\n";
  return 0;
}

int cmd_run(const std::string& spec_path, const std::string& out, const std::vector<std::uint64_t>& Ts,
            const std::vector<std::uint64_t>& seeds, std::size_t replicas, bool dry_run) {
  ExperimentSpec spec = load_experiment(spec_path);
  if (!Ts.empty()) spec.T_list = Ts;
  if (!seeds.empty()) spec.seeds = seeds;
  if (replicas > 0) spec.base.replicas = replicas;
  for (auto T : spec.T_list) {
    SimConfig c = spec.base;
    c.T = T;
    c.validate();
  }
  if (dry_run) {
    std::cout << "spec " << spec.name << " is valid: " << spec.T_list.size() << " horizon(s), " << spec.seeds.size()
              << " seed(s), " << spec.base.replicas << " replica(s)\n";
    return 0;
  }
  fs::path dir = out.empty() ? fs::path(spec.outputs.dir) : fs::path(out);
  auto res = run_experiment(spec, worker_count());
  write_experiment_outputs(spec, res, dir);
  for (const auto& cell : res.cells) {
    std::cout << "T=" << cell.T << " seed=" << cell.seed << ": mean u " << g(cell.summary.avg_u.mean) << " (se "
              << g(cell.summary.avg_u.se) << "), mean creg " << g(cell.summary.creg.mean) << ", mean csreg "
              << g(cell.summary.csreg.mean) << "\n";
    for (const auto& c : cell.checks)
      std::cout << "  " << to_string(c.check) << " " << c.bound_name << ": " << (c.pass ? "pass" : "FAIL")
                << " (measured " << g(c.lhs) << ", bound " << g(c.rhs) << ", margin " << g(c.margin) << ")"
                << (c.note.empty() ? "" : " " + c.note) << "\n";
  }
  std::cout << "outputs written to " << dir.string() << "\n";
  return res.all_checks_pass() ? 0 : 1;
}

int cmd_accept(bool list, bool negative, const std::vector<int>& only_ids, const std::string& root) {
  namespace pa = palab::accept;
  if (list) {
    for (const auto& c : pa::criteria()) std::printf("%2d  %s (limit %.0fs)\n", c.id, c.title.c_str(), c.limit_seconds);
    return 0;
  }
  pa::Options opt;
  opt.root = root;
  opt.workers = worker_count();
  if (negative) {
    auto r = pa::run_negative_control(opt);
    std::cout << pa::format_line(r) << std::endl;
    return r.pass() ? 0 : 1;
  }
  std::vector<int> ids = only_ids;
  if (ids.empty())
    for (const auto& c : pa::criteria()) ids.push_back(c.id);
  std::size_t failed = 0;
  for (int id : ids) {
    auto r = pa::run_criterion(id, opt);
    std::cout << pa::format_line(r) << std::endl;
    failed += r.pass() ? 0 : 1;
  }
  std::cout << (ids.size() - failed) << "/" << ids.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"palab: principal-agent learning lab"};
  app.require_subcommand(1);

  InstanceArgs an_inst;
  std::vector<double> an_deltas{0.001, 0.01, 0.05};
  std::string emit;
  auto* analyze_cmd = app.add_subcommand("analyze", "Stackelberg value, gap, constants and theorem bounds");
  an_inst.add_to(analyze_cmd);
  analyze_cmd->add_option("--delta", an_deltas, "deltas at which to evaluate the bounds");
  analyze_cmd->add_option("--emit-instance", emit, "also write the instance as JSON");

  InstanceArgs ob_inst;
  std::vector<double> ob_deltas{0.0, 0.01, 0.05};
  std::string budget;
  bool certificates = false;
  auto* obj_cmd = app.add_subcommand("objectives", "search the four robust objectives");
  ob_inst.add_to(obj_cmd);
  obj_cmd->add_option("--delta", ob_deltas, "agent slack values");
  obj_cmd->add_option("--budget", budget, "N, or grid=N,samples=N,refine=N,seed=N");
  obj_cmd->add_flag("--certificates", certificates, "print the strategies achieving each value");

  InstanceArgs co_inst;
  double co_delta = 0.01, co_eps = 0.0, co_Delta = 0.1;
  auto* con_cmd = app.add_subcommand("construct", "robust scheme, exact best-response embedding and filtering");
  co_inst.add_to(con_cmd);
  con_cmd->add_option("--delta", co_delta, "agent slack");
  con_cmd->add_option("--epsilon", co_eps, "robustness margin (0 picks a default)");
  con_cmd->add_option("--Delta", co_Delta, "filtering threshold");

  std::string spec_path, out;
  std::vector<std::uint64_t> Ts, seeds;
  std::size_t replicas = 0;
  bool dry_run = false;
  auto* run_cmd = app.add_subcommand("run", "run an experiment spec and write CSV and report files");
  run_cmd->add_option("spec", spec_path, "experiment JSON")->required();
  run_cmd->add_option("--out", out, "output directory (default: the spec's outputs.dir)");
  run_cmd->add_option("--T", Ts, "override the horizons");
  run_cmd->add_option("--seeds", seeds, "override the seeds");
  run_cmd->add_option("--replicas", replicas, "override the replica count");
  run_cmd->add_flag("--dry-run", dry_run, "validate the spec without running");

  bool acc_list = false, acc_neg = false;
  std::vector<int> acc_only;
  std::string root = PALAB_SOURCE_DIR;
  auto* acc_cmd = app.add_subcommand("accept", "run the acceptance criteria");
  acc_cmd->add_flag("--list", acc_list, "list the criteria");
  acc_cmd->add_flag("--negative-control", acc_neg, "run the misspecified-agent control");
  acc_cmd->add_option("--only", acc_only, "run only these criteria");
  acc_cmd->add_option("--root", root, "repository root holding experiments/ and fixtures/");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(an_inst, an_deltas, emit);
    if (*obj_cmd) return cmd_objectives(ob_inst, ob_deltas, budget, certificates);
    if (*con_cmd) return cmd_construct(co_inst, co_delta, co_eps, co_Delta);
    if (*run_cmd) return cmd_run(spec_path, out, Ts, seeds, replicas, dry_run);
    if (*acc_cmd) return cmd_accept(acc_list, acc_neg, acc_only, root);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
