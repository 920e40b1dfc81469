#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "critlab/branching_model.hpp"
#include "critlab/series.hpp"

// Exact event-driven simulation of the branching process Z(t) and of the
// Q-process W(t) (the branching process conditioned on non-extinction),
// plus the Monte Carlo estimators built on them.
namespace critlab {

enum class ProcessKind { Branching, QProcess };

struct SimOptions {
  std::uint64_t population_cap = 1'000'000'000;  // exceeding it censors the path
  bool record_path = true;
};

inline constexpr double kNotExtinct = std::numeric_limits<double>::infinity();
// Grid value for sizes that are unknown because the path was censored.
inline constexpr std::uint64_t kAboveCap = std::numeric_limits<std::uint64_t>::max();

struct Trajectory {
  std::vector<double> times;         // event times, times[0] = 0
  std::vector<std::uint64_t> sizes;  // size right after each event
  double horizon = 0.0;
  double extinction_time = kNotExtinct;
  bool censored = false;  // population cap exceeded before the horizon
  std::uint64_t events = 0;

  bool extinct() const noexcept { return extinction_time != kNotExtinct; }
  // Size at time t <= horizon (right-continuous). Needs the recorded path.
  std::uint64_t size_at(double t) const;
};

// Holding time Exp(i |a_1|); branching: i -> i + k - 1 with k ~ a_k/|a_1|.
Trajectory simulate_mbp(const OffspringDistribution& dist, std::uint64_t i0, double horizon, Rng& rng,
                        const SimOptions& opt = {});
// Q-process: i -> i + k - 1 with probability (i + k - 1) a_k / (i |a_1|),
// drawn as a plain jump with probability (i-1)/i and a size-biased one
// otherwise.
Trajectory simulate_qprocess(const OffspringDistribution& dist, std::uint64_t i0, double horizon, Rng& rng,
                             const SimOptions& opt = {});

// Shared cap on the total number of events of a Monte Carlo run. Paths
// check it every few thousand events and throw BudgetExceeded when spent.
struct EventBudget {
  std::uint64_t limit = 0;  // 0: unlimited
  std::atomic<std::uint64_t> used{0};
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::uint64_t used, std::size_t paths_done)
      : std::runtime_error("Monte Carlo event budget exhausted"), used_(used), paths_done_(paths_done) {}
  std::uint64_t events_used() const noexcept { return used_; }
  std::size_t paths_done() const noexcept { return paths_done_; }

 private:
  std::uint64_t used_;
  std::size_t paths_done_;
};

// One path observed on an increasing time grid.
struct GridPath {
  std::vector<std::uint64_t> sizes;  // kAboveCap after censoring
  double extinction_time = kNotExtinct;
  bool censored = false;
  std::uint64_t events = 0;
};
GridPath simulate_on_grid(ProcessKind kind, const OffspringDistribution& dist, std::uint64_t i0,
                          std::span<const double> grid, Rng& rng, const SimOptions& opt = {},
                          EventBudget* budget = nullptr);

struct MCConfig {
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::uint64_t i0 = 1;
  SimOptions sim{.population_cap = 1'000'000'000, .record_path = false};
  series::Exec exec = series::Exec::Parallel;
  std::size_t chunk = 512;  // paths per RNG stream
  std::uint64_t max_events = 0;  // total over all paths; 0: unlimited
};

// Path p belongs to chunk p / chunk, whose generator is seeded from
// (seed, chunk index); results do not depend on the thread count.
Rng chunk_rng(std::uint64_t seed, std::uint64_t chunk);

// n paths on a common time grid (common random numbers across grid points).
struct GridRun {
  std::vector<double> grid;
  std::vector<std::vector<std::uint64_t>> sizes;  // sizes[g][path]
  std::vector<double> extinction_time;            // per path
  std::size_t censored = 0;
  std::uint64_t events = 0;
  std::uint64_t seed = 0;

  std::size_t n() const noexcept { return extinction_time.size(); }
};
GridRun run_grid(ProcessKind kind, const OffspringDistribution& dist, std::span<const double> grid,
                 const MCConfig& cfg);

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};
// p_hat with sqrt(p_hat (1 - p_hat) / n).
MCEstimate proportion(std::size_t hits, std::size_t n, std::uint64_t seed);

// P{Z(t) > 0} at every grid point.
std::vector<MCEstimate> survival_estimates(const GridRun& run);
// P{size = j} for j = 0..jmax at grid point g.
std::vector<MCEstimate> cell_estimates(const GridRun& run, std::size_t g, std::size_t jmax);
// Sample mean of the size at grid point g with the sample standard error.
// Censored paths make it undefined (NumericalError).
MCEstimate mean_size(const GridRun& run, std::size_t g);
// Mean extinction time of the paths that went extinct, with its sample
// standard error.
MCEstimate mean_extinction_time(const GridRun& run);

// Empirical law of q(t) W(t).
struct EmpiricalCDF {
  std::vector<double> sample;  // sorted; +inf for censored paths
  double t = 0.0;
  double q = 0.0;

  double operator()(double x) const;  // fraction of sample <= x
  // Dvoretzky-Kiefer-Wolfowitz half-width at confidence 1 - alpha.
  double dkw_band(double alpha = 0.05) const;
};
EmpiricalCDF empirical_D(const GridRun& run, std::size_t g, double q);
EmpiricalCDF empirical_D(const OffspringDistribution& dist, double t, double q, const MCConfig& cfg);

// sup_x |F_n(x) - D(x)| for a continuous D, checked on both sides of every
// jump of F_n. D is evaluated once per distinct sample value.
double ks_distance(const EmpiricalCDF& emp, const std::function<double(double)>& D);

}  // namespace critlab
