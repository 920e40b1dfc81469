#include <omp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "critlab/acceptance.hpp"
#include "critlab/error.hpp"
#include "critlab/harness.hpp"

namespace fs = std::filesystem;
using namespace critlab;

namespace {

struct Args {
  std::string config;
  std::string only;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool no_budget = false;
  bool serial = false;
  std::vector<std::string> csv_files;
};

harness::ExperimentConfig config_of(const Args& a, bool required) {
  harness::ExperimentConfig c;
  if (!a.config.empty())
    c = harness::load_config(a.config);
  else if (required)
    throw ConfigError("config", "--config is required for this command");
  if (a.seed) c.seed = a.seed;
  if (!a.out.empty()) c.out_dir = a.out;
  return c;
}

std::string out_path(const harness::ExperimentConfig& c, const std::string& file) {
  fs::create_directories(c.out_dir);
  return (fs::path(c.out_dir) / file).string();
}

int cmd_solve(const Args& a) {
  const auto c = config_of(a, true);
  const auto rows = harness::solve_rows(c);
  const auto path = out_path(c, "solve.csv");
  harness::write_csv_file(path, rows);
  std::cout << "wrote " << rows.size() << " rows to " << path << '\n';
  return 0;
}

int cmd_simulate(const Args& a) {
  const auto c = config_of(a, true);
  std::ofstream dump;
  if (c.dump_trajectories > 0) dump.open(out_path(c, "trajectories.jsonl"), std::ios::binary);
  const auto rows = harness::simulate_rows(c, dump.is_open() ? &dump : nullptr);
  const auto path = out_path(c, "simulate.csv");
  harness::write_csv_file(path, rows);
  std::cout << "wrote " << rows.size() << " rows to " << path << '\n';
  return 0;
}

int cmd_rates(const Args& a) {
  const auto c = config_of(a, true);
  std::vector<harness::ReportRow> records;
  const auto fits = harness::rate_rows(c, &records);
  harness::write_csv_file(out_path(c, "rates.csv"), records);
  std::ofstream f(out_path(c, "rates_fit.csv"), std::ios::binary);
  harness::write_rates_csv(f, fits);
  harness::write_rates_csv(std::cout, fits);
  return 0;
}

int cmd_verify(const Args& a) {
  const auto c = config_of(a, false);
  acceptance::Options o;
  o.enforce_budget = !a.no_budget;
  o.exec = a.serial ? series::Exec::Serial : series::Exec::Parallel;
  if (c.seed) o.seed = *c.seed;
  o.overrides = c.overrides;
  const std::string out = a.out.empty() && a.config.empty() ? std::string() : c.out_dir;
  return acceptance::run_suite(a.only, o, out, std::cout);
}

int cmd_report(const Args& a) {
  std::vector<std::string> files = a.csv_files;
  if (files.empty()) {
    const fs::path dir = a.out.empty() ? fs::path(".") : fs::path(a.out);
    for (const char* n : {"solve.csv", "simulate.csv", "rates.csv", "verify.csv"})
      if (fs::exists(dir / n)) files.push_back((dir / n).string());
  }
  if (files.empty()) throw ConfigError("out", "no report CSV files found");
  std::vector<harness::ReportRow> rows;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw ConfigError("csv", "cannot open '" + f + "'");
    auto r = harness::read_csv(in, f);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  std::cout << "experiment,equation,method,rows,with_error,min_error,max_error\n";
  for (const auto& s : harness::summarize(rows)) {
    std::cout << s.experiment << ',' << s.equation << ',' << s.method << ',' << s.rows << ',' << s.with_error << ',';
    if (s.with_error)
      std::cout << harness::format_double(s.min_error) << ',' << harness::format_double(s.max_error);
    else
      std::cout << ',';
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critlab: critical branching processes with slowly varying mechanisms"};
  app.require_subcommand(1);
  Args a;
  app.add_option("--threads", a.threads, "OpenMP threads (fallback: CRITLAB_THREADS)");

  auto common = [&](CLI::App* s) {
    s->add_option("--config", a.config, "flat key=value experiment file");
    s->add_option("--out", a.out, "output directory (overrides out_dir)");
    s->add_option("--seed", a.seed, "Monte Carlo seed (overrides the config)");
    s->add_option("--threads", a.threads, "OpenMP threads (fallback: CRITLAB_THREADS)");
  };
  auto* solve = app.add_subcommand("solve", "engine sweeps over the config grids");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates with standard errors");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  auto* rates = app.add_subcommand("rates", "convergence-rate fits");
  auto* report = app.add_subcommand("report", "summarize report CSV files");
  for (auto* s : {solve, simulate, verify, rates, report}) common(s);
  verify->add_option("--only", a.only, "criterion numbers or formula tags, comma separated");
  verify->add_flag("--no-budget", a.no_budget, "do not fail criteria on runtime budgets");
  verify->add_flag("--serial", a.serial, "use the serial kernels");
  report->add_option("files", a.csv_files, "CSV files (default: the reports in --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (a.threads <= 0)
    if (const char* env = std::getenv("CRITLAB_THREADS")) a.threads = std::atoi(env);
  if (a.threads > 0) omp_set_num_threads(a.threads);

  try {
    if (*solve) return cmd_solve(a);
    if (*simulate) return cmd_simulate(a);
    if (*verify) return cmd_verify(a);
    if (*rates) return cmd_rates(a);
    return cmd_report(a);
  } catch (const ConfigError& e) {
    std::cerr << "config error";
    if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
    std::cerr << ": " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
