#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "acceptance.hpp"
#include "palab/solvers.hpp"

#ifndef PALAB_SOURCE_DIR
#define PALAB_SOURCE_DIR "."
#endif

int main(int argc, char** argv) {
  CLI::App app{"palab acceptance suite"};
  bool list = false, negative = false;
  std::vector<int> only;
  std::string root = PALAB_SOURCE_DIR;
  app.add_flag("--list", list, "list the criteria and exit");
  app.add_option("--only", only, "run only these criteria");
  app.add_flag("--negative-control", negative, "run the misspecified-agent control; exits 1 when its check fails");
  app.add_option("--root", root, "repository root holding experiments/ and fixtures/");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  namespace pa = palab::accept;
  if (list) {
    for (const auto& c : pa::criteria()) std::printf("%2d  %s (limit %.0fs)\n", c.id, c.title.c_str(), c.limit_seconds);
    return 0;
  }
  pa::Options opt;
  opt.root = root;
  opt.workers = palab::worker_count();
  if (negative) {
    auto r = pa::run_negative_control(opt);
    std::cout << pa::format_line(r) << std::endl;
    return r.pass() ? 0 : 1;
  }
  if (only.empty())
    for (const auto& c : pa::criteria()) only.push_back(c.id);
  int failed = 0;
  for (int id : only) {
    try {
      auto r = pa::run_criterion(id, opt);
      std::cout << pa::format_line(r) << std::endl;
      failed += r.pass() ? 0 : 1;
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
  }
  std::cout << (only.size() - failed) << "/" << only.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
