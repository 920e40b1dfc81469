#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "critlab/kolmogorov.hpp"
#include "critlab/simulator.hpp"
#include "critlab/sv_kernel.hpp"

// Experiment configuration, report rows and the solve / simulate / rates /
// report commands. The verify command lives in acceptance.hpp.
namespace critlab::harness {

// Flat `key = value` text, one key per line, `#` starts a comment.
struct ExperimentConfig {
  std::string experiment = "run";
  ModelParams model;
  // Geometric t grid; `t_list` replaces it when given.
  double t_min = 1.0;
  double t_max = 10.0;
  std::size_t t_points = 2;
  std::vector<double> t_list;
  std::vector<double> s_list{0.0};
  double theta_min = 1e-3;
  double theta_max = 1e3;
  std::size_t theta_points = 200;
  std::size_t mc_n = 1000;
  std::optional<std::uint64_t> seed;
  SolveConfig solve;
  std::size_t series_J = 0;  // 0: no series rows
  std::size_t jmax = 10;
  std::uint64_t population_cap = 1'000'000'000;
  std::uint64_t i0 = 1;
  ProcessKind process = ProcessKind::Branching;
  std::string out_dir = ".";
  std::size_t dump_trajectories = 0;  // number of recorded paths written as JSON lines
  // `band.<tag>` and `t_eval.<tag>`: acceptance overrides, keyed by tag.
  std::map<std::string, double> overrides;

  std::vector<double> t_grid() const;
  std::vector<double> theta_grid() const;
  void validate() const;  // throws ConfigError naming the field
};

// `source` names the input in diagnostics ("path:line: field: message").
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig parse_config_string(std::string_view text);
ExperimentConfig load_config(const std::string& path);

struct ReportRow {
  std::string experiment;
  std::string equation;  // catalog tag
  double t = 0.0;
  double exact = 0.0;
  std::optional<double> predicted;
  std::optional<double> normalized_error;
  std::string method;  // provenance of `exact`: ode | oracle | mc
  std::optional<double> std_error;
};

inline constexpr std::string_view kCsvHeader =
    "experiment,equation,t,exact,predicted,normalized_error,method,stderr";
std::string format_double(double x);  // %.17g; empty for nullopt at the call site
void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);
// Writes to `path`, creating parent directories.
void write_csv_file(const std::string& path, const std::vector<ReportRow>& rows);

// Engine sweep over t_grid x s_list: survival R rows, G rows for s > 0,
// P_11 rows when series_J > 0.
std::vector<ReportRow> solve_rows(const ExperimentConfig& cfg);

// Monte Carlo estimates with standard errors. Needs cfg.seed. When
// `trajectories` is non-null, the first cfg.dump_trajectories paths are
// written to it as JSON lines; they are the same paths as in the run.
std::vector<ReportRow> simulate_rows(const ExperimentConfig& cfg, std::ostream* trajectories = nullptr);

struct RateRow {
  std::string quantity;
  std::string equation;
  std::string axis;  // log_t | log_t_over_t
  double slope;
  double intercept;
  double r2;
  double constant;
  std::optional<double> expected_constant;
  bool accepted;
};
// Fits over the part of t_grid with t >= 100.
std::vector<RateRow> rate_rows(const ExperimentConfig& cfg, std::vector<ReportRow>* records = nullptr);
void write_rates_csv(std::ostream& out, const std::vector<RateRow>& rows);

// Reads report CSVs and prints per-(experiment, equation, method) counts and
// the range of normalized_error.
struct ReportSummary {
  std::string experiment, equation, method;
  std::size_t rows = 0;
  double min_error = 0.0, max_error = 0.0;
  std::size_t with_error = 0;
};
std::vector<ReportRow> read_csv(std::istream& in, const std::string& source = "<csv>");
std::vector<ReportSummary> summarize(const std::vector<ReportRow>& rows);

}  // namespace critlab::harness
