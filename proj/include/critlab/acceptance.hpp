#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "critlab/harness.hpp"
#include "critlab/series.hpp"

// The acceptance suite: twelve criteria, each with its own tolerance band and
// runtime budget. Analytic criteria never touch the simulator.
namespace critlab::acceptance {

struct Options {
  series::Exec exec = series::Exec::Parallel;
  bool enforce_budget = true;  // a criterion over its runtime budget fails
  std::uint64_t seed = 20260917;
  std::map<std::string, double> overrides;  // band.<tag>, t_eval.<tag>
  std::ostream* log = nullptr;              // progress of long criteria
};

struct Outcome {
  int id = 0;
  std::string tag;
  std::string title;
  bool passed = false;
  bool numerical_failure = false;  // solver or inversion error
  bool over_budget = false;
  double seconds = 0.0;
  double budget = 0.0;
  std::string summary;
  std::vector<std::string> notes;  // supplementary, never affect `passed`
  std::vector<harness::ReportRow> rows;
};

struct Criterion {
  int id;
  std::string tag;
  std::vector<std::string> aliases;
  std::string title;
  double budget_seconds;
  std::function<void(const Options&, Outcome&)> body;  // sets passed, summary, rows
};

const std::vector<Criterion>& registry();

// `only`: empty for all, else a comma list of criterion numbers or tags.
// Throws ConfigError("only", ...) for anything that matches nothing.
std::vector<const Criterion*> select(std::string_view only);

Outcome run(const Criterion& c, const Options& opt);

std::string status_line(const Outcome& o);
// 0 all passed, 3 if any criterion hit a numerical failure, else 1.
int exit_code(const std::vector<Outcome>& outcomes);

void write_summary_csv(std::ostream& out, const std::vector<Outcome>& outcomes);

// Runs the selection, prints one status line per criterion (plus notes) to
// `out`, and writes verify.csv and acceptance.csv into out_dir when it is
// non-empty. Returns the exit code.
int run_suite(std::string_view only, const Options& opt, const std::string& out_dir, std::ostream& out);

}  // namespace critlab::acceptance
