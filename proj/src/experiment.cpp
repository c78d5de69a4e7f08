#include "palab/experiment.hpp"

#include <cstdio>
#include <fstream>

namespace palab {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

AnyInstance instance_ref_from_json(const Json& j, const std::filesystem::path& base_dir, const std::string& path,
                                   std::string* label) {
  using namespace json_field;
  if (!j.is_object()) throw FormatError(path, "expected an object");
  if (j.contains("preset")) {
    check_keys(j, path, {"preset"}, {});
    const std::string name = string(j, "preset", path);
    if (label) *label = name;
    try {
      return load_preset(name);
    } catch (const std::exception& e) {
      throw FormatError(path + "/preset", e.what());
    }
  }
  if (j.contains("file")) {
    check_keys(j, path, {"file"}, {});
    std::filesystem::path file = string(j, "file", path);
    if (label) *label = file.string();
    if (file.is_relative()) file = base_dir / file;
    return load_instance_file(file);
  }
  if (label) *label = "inline";
  return instance_from_json(j, path);
}

namespace {

std::vector<std::uint64_t> counts(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = j.at(key);
  std::vector<std::uint64_t> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_unsigned()) throw FormatError(path + "/" + key + "/" + std::to_string(i), "expected a nonnegative integer");
      out.push_back(v[i].get<std::uint64_t>());
    }
  } else {
    out.push_back(json_field::count(j, key, path));
  }
  if (out.empty()) throw FormatError(path + "/" + key, "needs at least one entry");
  return out;
}

PolicyConfig policy_from(const Json& j, const std::string& path) {
  using namespace json_field;
  check_keys(j, path, {"kind"}, {"params"});
  PolicyConfig p;
  p.kind = string(j, "kind", path);
  const Json params = j.contains("params") ? j.at("params") : Json::object();
  const std::string pp = path + "/params";
  if (p.kind == "fixed") {
    check_keys(params, pp, {"strategy"}, {});
    p.strategy = strategy_from_json(params.at("strategy"), pp + "/strategy");
  } else if (p.kind == "robust_fixed") {
    check_keys(params, pp, {}, {"delta", "epsilon", "target"});
    if (params.contains("target")) p.target = string(params, "target", pp);
    if (params.contains("delta")) p.delta = number(params, "delta", pp);
    if (params.contains("epsilon")) p.epsilon = number(params, "epsilon", pp);
  } else if (p.kind == "stackelberg" || p.kind == "no_info" || p.kind == "mean_exploiter" || p.kind == "adaptive") {
    check_keys(params, pp, {}, {});
  } else {
    throw FormatError(path + "/kind", "unknown policy kind '" + p.kind + "'");
  }
  return p;
}

LearnerConfig learner_from(const Json& j, const std::string& path) {
  using namespace json_field;
  check_keys(j, path, {"kind"}, {"params", "seed", "feedback_mode"});
  LearnerConfig L;
  L.kind = string(j, "kind", path);
  if (j.contains("seed")) L.seed = count(j, "seed", path);
  if (j.contains("feedback_mode")) {
    try {
      L.feedback = parse_feedback_mode(string(j, "feedback_mode", path));
    } catch (const std::invalid_argument& e) {
      throw FormatError(path + "/feedback_mode", e.what());
    }
  }
  const Json params = j.contains("params") ? j.at("params") : Json::object();
  const std::string pp = path + "/params";
  std::vector<std::string> allowed;
  if (L.kind == "exp3" || L.kind == "hedge" || L.kind == "swap_regret" || L.kind == "best_response") {
  } else if (L.kind == "mean_based") {
    allowed = {"gamma", "variant"};
    if (!j.contains("feedback_mode")) L.feedback = FeedbackMode::FullInfo;
  } else if (L.kind == "quantal") {
    allowed = {"lambda"};
  } else if (L.kind == "inaccurate_belief") {
    allowed = {"epsilon"};
  } else if (L.kind == "adversarial" || L.kind == "favorable") {
    allowed = {"delta"};
  } else {
    throw FormatError(path + "/kind", "unknown learner kind '" + L.kind + "'");
  }
  check_keys(params, pp, {}, allowed);
  if (params.contains("gamma")) L.gamma = number(params, "gamma", pp);
  if (params.contains("variant")) {
    try {
      L.variant = parse_mean_based_variant(string(params, "variant", pp));
    } catch (const std::invalid_argument& e) {
      throw FormatError(pp + "/variant", e.what());
    }
  }
  if (params.contains("lambda")) L.lambda = number(params, "lambda", pp);
  if (params.contains("epsilon")) L.epsilon = number(params, "epsilon", pp);
  if (params.contains("delta")) L.delta = number(params, "delta", pp);
  if (L.kind == "mean_based" && L.feedback != FeedbackMode::FullInfo)
    throw FormatError(path + "/feedback_mode", "mean-based learners need full_info feedback");
  return L;
}

}  // namespace

ExperimentSpec experiment_from_json(const Json& j, const std::filesystem::path& base_dir) {
  using namespace json_field;
  check_keys(j, "", {"name", "instance", "policy", "learner", "T"},
             {"planning_instance", "mode", "seeds", "replicas", "checks", "se_mult", "outputs"});
  ExperimentSpec spec;
  spec.name = string(j, "name", "");
  spec.base.instance = instance_ref_from_json(j.at("instance"), base_dir, "/instance", &spec.instance_ref);
  if (j.contains("planning_instance"))
    spec.base.planning = instance_ref_from_json(j.at("planning_instance"), base_dir, "/planning_instance");
  if (j.contains("mode")) {
    try {
      spec.base.mode = parse_sim_mode(string(j, "mode", ""));
    } catch (const std::invalid_argument& e) {
      throw FormatError("/mode", e.what());
    }
  }
  spec.base.policy = policy_from(j.at("policy"), "/policy");
  spec.base.learner = learner_from(j.at("learner"), "/learner");
  spec.T_list = counts(j, "T", "");
  spec.seeds = j.contains("seeds") ? counts(j, "seeds", "") : std::vector<std::uint64_t>{1};
  if (j.contains("replicas")) spec.base.replicas = count(j, "replicas", "");
  if (j.contains("checks")) {
    const Json& c = j.at("checks");
    if (!c.is_array()) throw FormatError("/checks", "expected an array of check names");
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string p = "/checks/" + std::to_string(i);
      if (!c[i].is_string()) throw FormatError(p, "expected a string");
      try {
        spec.checks.push_back(parse_check(c[i].get<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw FormatError(p, e.what());
      }
    }
  }
  if (j.contains("se_mult")) spec.se_mult = number(j, "se_mult", "");
  if (j.contains("outputs")) {
    const Json& o = j.at("outputs");
    check_keys(o, "/outputs", {}, {"dir", "rounds_csv", "rounds_csv_replicas"});
    if (o.contains("dir")) spec.outputs.dir = string(o, "dir", "/outputs");
    if (o.contains("rounds_csv")) {
      if (!o.at("rounds_csv").is_boolean()) throw FormatError("/outputs/rounds_csv", "expected true or false");
      spec.outputs.rounds_csv = o.at("rounds_csv").get<bool>();
    }
    if (o.contains("rounds_csv_replicas")) spec.outputs.rounds_csv_replicas = count(o, "rounds_csv_replicas", "/outputs");
  }
  for (std::uint64_t T : spec.T_list) {
    SimConfig c = spec.base;
    c.T = T;
    try {
      c.validate();
    } catch (const std::exception& e) {
      throw FormatError("", std::string("invalid experiment: ") + e.what());
    }
  }
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  try {
    return experiment_from_json(j, path.parent_path());
  } catch (const FormatError& e) {
    throw FormatError(path.string(), e.what());
  }
}

bool ExperimentResult::all_checks_pass() const {
  for (const auto& c : cells)
    for (const auto& r : c.checks)
      if (!r.pass) return false;
  return true;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, std::size_t workers) {
  ExperimentResult out;
  out.analysis = analyze(generalized(spec.base.planned()));
  for (std::uint64_t T : spec.T_list) {
    for (std::uint64_t seed : spec.seeds) {
      SimConfig c = spec.base;
      c.T = T;
      c.seed = seed;
      c = resolve(c);
      ExperimentCell cell;
      cell.T = T;
      cell.seed = seed;
      cell.robust_delta = c.policy.delta;
      cell.summary = run_replicas(c, workers);
      BoundInputs in = bound_inputs(cell.summary);
      in.se_mult = spec.se_mult;
      for (Check k : spec.checks) cell.checks.push_back(bound_check(in, out.analysis, k));
      out.cells.push_back(std::move(cell));
    }
  }
  return out;
}

void write_experiment_outputs(const ExperimentSpec& spec, const ExperimentResult& result,
                              const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  const std::size_t nA = generalized(spec.base.instance).n_actions();
  {
    auto f = open("summary.csv");
    f << "T,seed,replica,avg_u,avg_u_expected,avg_v,creg,csreg,creg_realized,csreg_realized\n";
    for (const auto& c : result.cells)
      for (const auto& r : c.summary.runs)
        f << c.T << ',' << c.seed << ',' << r.replica << ',' << format_double(r.avg_u) << ','
          << format_double(r.avg_u_expected) << ',' << format_double(r.avg_v) << ',' << format_double(r.creg) << ','
          << format_double(r.csreg) << ',' << format_double(r.creg_realized) << ','
          << format_double(r.csreg_realized) << '\n';
  }
  {
    auto f = open("by_T.csv");
    f << "T,seed,replicas,mean_u,se_u,median_u,mean_creg,median_creg,mean_csreg,median_csreg\n";
    for (const auto& c : result.cells) {
      const auto& s = c.summary;
      f << c.T << ',' << c.seed << ',' << s.runs.size() << ',' << format_double(s.avg_u.mean) << ','
        << format_double(s.avg_u.se) << ',' << format_double(s.avg_u.median) << ',' << format_double(s.creg.mean)
        << ',' << format_double(s.creg.median) << ',' << format_double(s.csreg.mean) << ','
        << format_double(s.csreg.median) << '\n';
    }
  }
  {
    auto f = open("report.txt");
    const auto& an = result.analysis;
    f << "[experiment]\nname = " << spec.name << "\ninstance = " << spec.instance_ref
      << "\nmode = " << to_string(spec.base.mode) << "\npolicy = " << spec.base.policy.kind
      << "\nlearner = " << spec.base.learner.kind << "\nfeedback = " << to_string(spec.base.learner.feedback)
      << "\nreplicas = " << spec.base.replicas << "\n\n[analysis]\nU_star = " << format_double(an.U_star)
      << "\nG = " << format_double(an.G) << "\nB = " << format_double(an.B) << "\n";
    for (const auto& c : result.cells) {
      f << "\n[result T=" << c.T << " seed=" << c.seed << "]\n";
      if (c.robust_delta) f << "robust_delta = " << format_double(*c.robust_delta) << "\n";
      f << "mean_u = " << format_double(c.summary.avg_u.mean) << "\nse_u = " << format_double(c.summary.avg_u.se)
        << "\nci_u = [" << format_double(c.summary.avg_u.ci_lo) << ", " << format_double(c.summary.avg_u.ci_hi)
        << "]\nmean_creg = " << format_double(c.summary.creg.mean)
        << "\nmean_csreg = " << format_double(c.summary.csreg.mean) << "\n";
      for (const auto& r : c.checks) {
        f << "\n[check " << to_string(r.check) << " T=" << c.T << " seed=" << c.seed << "]\nbound = " << r.bound_name
          << "\napplicable = " << (r.applicable ? "true" : "false") << "\ndelta = " << format_double(r.delta)
          << "\nmeasured = " << format_double(r.lhs) << "\nbound_value = " << format_double(r.rhs)
          << "\nmargin = " << format_double(r.margin) << "\nresult = " << (r.pass ? "pass" : "fail") << "\n";
        if (!r.applicable) f << "note = " << r.note << "\n";
      }
    }
  }
  if (!spec.outputs.rounds_csv) return;
  for (const auto& c : result.cells) {
    SimConfig cfg = spec.base;
    cfg.T = c.T;
    cfg.seed = c.seed;
    cfg.policy.delta = c.robust_delta;
    cfg.keep_rounds = true;
    const std::size_t k = std::min(spec.outputs.rounds_csv_replicas, cfg.replicas);
    for (std::size_t r = 0; r < k; ++r) {
      auto f = open("rounds_T" + std::to_string(c.T) + "_s" + std::to_string(c.seed) + "_r" + std::to_string(r) + ".csv");
      write_csv(f, run(cfg, r), nA);
    }
  }
}

}  // namespace palab
