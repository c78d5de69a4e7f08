#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace palab::accept {

struct CriterionInfo {
  int id;
  std::string title;
  double limit_seconds;
};

struct CriterionResult {
  CriterionInfo info;
  bool ok = false;  // the check itself
  double seconds = 0.0;
  std::string detail;
  bool pass() const { return ok && seconds < info.limit_seconds; }
};

struct Options {
  std::filesystem::path root;  // repository root holding experiments/ and fixtures/
  std::size_t workers = 0;     // 0: worker_count()
};

const std::vector<CriterionInfo>& criteria();
CriterionResult run_criterion(int id, const Options& opt);

// Lower-bound check on a game whose agent utilities differ from the ones the
// principal planned with; the check is expected to fail.
CriterionResult run_negative_control(const Options& opt);

std::string format_line(const CriterionResult& r);

}  // namespace palab::accept
