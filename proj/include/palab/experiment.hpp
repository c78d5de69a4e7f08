#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "palab/io.hpp"
#include "palab/sim.hpp"

namespace palab {

struct ExperimentOutputs {
  std::string dir = "out";
  bool rounds_csv = false;
  std::size_t rounds_csv_replicas = 1;
};

// A JSON experiment file: instance, policy, learner, horizons, seeds and the
// bound checks to evaluate. Everything written is a function of the spec.
struct ExperimentSpec {
  std::string name;
  std::string instance_ref;  // preset string or file path, for reports
  SimConfig base;            // T and seed are overridden per run
  std::vector<std::uint64_t> T_list;
  std::vector<std::uint64_t> seeds;
  std::vector<Check> checks;
  double se_mult = 3.0;
  ExperimentOutputs outputs;
};

// Relative instance paths resolve against base_dir.
ExperimentSpec experiment_from_json(const Json& j, const std::filesystem::path& base_dir);
ExperimentSpec load_experiment(const std::filesystem::path& path);

// {"preset": "..."} | {"file": "..."} | an inline instance object.
AnyInstance instance_ref_from_json(const Json& j, const std::filesystem::path& base_dir, const std::string& path,
                                   std::string* label = nullptr);

struct ExperimentCell {
  std::uint64_t T = 0;
  std::uint64_t seed = 0;
  std::optional<double> robust_delta;
  ReplicaSummary summary;
  std::vector<BoundReport> checks;
};

struct ExperimentResult {
  InstanceAnalysis analysis;
  std::vector<ExperimentCell> cells;
  bool all_checks_pass() const;
};

ExperimentResult run_experiment(const ExperimentSpec& spec, std::size_t workers = 0);

// summary.csv, by_T.csv, report.txt and, when enabled, rounds_T{T}_s{seed}_r{k}.csv.
void write_experiment_outputs(const ExperimentSpec& spec, const ExperimentResult& result,
                              const std::filesystem::path& dir);

std::string format_double(double x);

}  // namespace palab
