#include "critlab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

#include "critlab/error.hpp"

namespace critlab {

std::uint64_t Trajectory::size_at(double t) const {
  if (times.empty()) throw DomainError("Trajectory::size_at: path was not recorded");
  if (!(t >= 0.0 && t <= horizon)) throw DomainError("Trajectory::size_at: t outside [0, horizon]");
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  return sizes[static_cast<std::size_t>(it - times.begin()) - 1];
}

namespace {

// Event loop shared by both processes. `observe(t_end, i)` is told that the
// size was i on [t, t_end); it returns false once the observer needs no
// more time. `on_jump(t, i)` sees each new size.
template <class Observe, class OnJump>
void event_loop(ProcessKind kind, const OffspringDistribution& dist, std::uint64_t i0, double horizon, Rng& rng,
                const SimOptions& opt, double& extinction, bool& censored, std::uint64_t& events,
                Observe&& observe, OnJump&& on_jump, EventBudget* budget = nullptr) {
  constexpr std::uint64_t kBudgetStride = 4096;
  if (i0 == 0) throw DomainError("simulate: i0 must be >= 1");
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double a1 = dist.jump_rate();
  double t = 0.0;
  std::uint64_t i = i0;
  for (;;) {
    const double t_next = t + expo(rng) / (static_cast<double>(i) * a1);
    if (!observe(std::min(t_next, horizon), i) || t_next >= horizon) return;
    std::uint64_t k;
    if (kind == ProcessKind::QProcess && u01(rng) * static_cast<double>(i) < 1.0)
      k = dist.sample_size_biased(rng);
    else
      k = dist.sample(rng);
    i = i + k - 1;
    t = t_next;
    ++events;
    if (budget && budget->limit && events % kBudgetStride == 0) {
      const auto used = budget->used.fetch_add(kBudgetStride) + kBudgetStride;
      if (used > budget->limit) throw BudgetExceeded(used, 0);
    }
    on_jump(t, i);
    if (i == 0) {
      extinction = t;
      observe(horizon, 0);
      return;
    }
    if (i > opt.population_cap) {
      censored = true;
      return;
    }
  }
}

Trajectory simulate(ProcessKind kind, const OffspringDistribution& dist, std::uint64_t i0, double horizon,
                    Rng& rng, const SimOptions& opt) {
  if (!(horizon >= 0.0)) throw DomainError("simulate: horizon must be >= 0");
  Trajectory tr;
  tr.horizon = horizon;
  if (opt.record_path) {
    tr.times.push_back(0.0);
    tr.sizes.push_back(i0);
  }
  event_loop(
      kind, dist, i0, horizon, rng, opt, tr.extinction_time, tr.censored, tr.events,
      [](double, std::uint64_t) { return true; },
      [&](double t, std::uint64_t i) {
        if (opt.record_path) {
          tr.times.push_back(t);
          tr.sizes.push_back(i);
        }
      });
  return tr;
}

}  // namespace

Trajectory simulate_mbp(const OffspringDistribution& dist, std::uint64_t i0, double horizon, Rng& rng,
                        const SimOptions& opt) {
  return simulate(ProcessKind::Branching, dist, i0, horizon, rng, opt);
}

Trajectory simulate_qprocess(const OffspringDistribution& dist, std::uint64_t i0, double horizon, Rng& rng,
                             const SimOptions& opt) {
  return simulate(ProcessKind::QProcess, dist, i0, horizon, rng, opt);
}

GridPath simulate_on_grid(ProcessKind kind, const OffspringDistribution& dist, std::uint64_t i0,
                          std::span<const double> grid, Rng& rng, const SimOptions& opt, EventBudget* budget) {
  if (grid.empty()) throw DomainError("simulate_on_grid: empty grid");
  for (std::size_t g = 0; g < grid.size(); ++g)
    if (!(grid[g] >= 0.0) || (g > 0 && !(grid[g] > grid[g - 1])))
      throw DomainError("simulate_on_grid: grid must be non-negative and increasing");
  GridPath p;
  p.sizes.assign(grid.size(), kAboveCap);
  std::size_t g = 0;
  // Size i holds on [t, t_end); grid points below t_end see it. The last
  // grid point is the horizon and belongs to the final holding interval.
  auto observe = [&](double t_end, std::uint64_t i) {
    while (g < grid.size() && (grid[g] < t_end || (t_end == grid.back() && grid[g] == t_end))) p.sizes[g++] = i;
    return g < grid.size();
  };
  event_loop(kind, dist, i0, grid.back(), rng, opt, p.extinction_time, p.censored, p.events, observe,
             [](double, std::uint64_t) {}, budget);
  if (budget && budget->limit) budget->used.fetch_add(p.events % 4096);
  return p;
}

Rng chunk_rng(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return Rng(seq);
}

GridRun run_grid(ProcessKind kind, const OffspringDistribution& dist, std::span<const double> grid,
                 const MCConfig& cfg) {
  if (cfg.n == 0) throw DomainError("run_grid: n must be >= 1");
  if (cfg.chunk == 0) throw DomainError("run_grid: chunk must be >= 1");
  GridRun run;
  run.grid.assign(grid.begin(), grid.end());
  run.seed = cfg.seed;
  run.sizes.assign(grid.size(), std::vector<std::uint64_t>(cfg.n));
  run.extinction_time.assign(cfg.n, kNotExtinct);
  std::vector<unsigned char> censored(cfg.n, 0);
  std::vector<std::uint64_t> events(cfg.n, 0);

  const auto nchunks = static_cast<long>((cfg.n + cfg.chunk - 1) / cfg.chunk);
  EventBudget budget;
  budget.limit = cfg.max_events;
  std::atomic<std::size_t> done{0};
  auto do_chunk = [&](long c) {
    Rng rng = chunk_rng(cfg.seed, static_cast<std::uint64_t>(c));
    const std::size_t lo = static_cast<std::size_t>(c) * cfg.chunk;
    const std::size_t hi = std::min(cfg.n, lo + cfg.chunk);
    for (std::size_t p = lo; p < hi; ++p) {
      const auto path = simulate_on_grid(kind, dist, cfg.i0, grid, rng, cfg.sim, &budget);
      ++done;
      for (std::size_t g = 0; g < grid.size(); ++g) run.sizes[g][p] = path.sizes[g];
      run.extinction_time[p] = path.extinction_time;
      censored[p] = path.censored;
      events[p] = path.events;
    }
  };
  try {
    if (cfg.exec == series::Exec::Parallel) {
      std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 1)
      for (long c = 0; c < nchunks; ++c) {
        if (budget.limit && budget.used.load() > budget.limit) continue;
        try {
          do_chunk(c);
        } catch (...) {
#pragma omp critical
          if (!err) err = std::current_exception();
        }
      }
      if (err) std::rethrow_exception(err);
    } else {
      for (long c = 0; c < nchunks; ++c) do_chunk(c);
    }
  } catch (const BudgetExceeded& e) {
    throw BudgetExceeded(e.events_used(), done.load());
  }
  for (std::size_t p = 0; p < cfg.n; ++p) {
    run.censored += censored[p];
    run.events += events[p];
  }
  return run;
}

MCEstimate proportion(std::size_t hits, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("proportion: n must be >= 1");
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n, seed};
}

std::vector<MCEstimate> survival_estimates(const GridRun& run) {
  std::vector<MCEstimate> out;
  for (const auto& col : run.sizes) {
    const auto alive = static_cast<std::size_t>(std::count_if(col.begin(), col.end(), [](auto z) { return z > 0; }));
    out.push_back(proportion(alive, run.n(), run.seed));
  }
  return out;
}

std::vector<MCEstimate> cell_estimates(const GridRun& run, std::size_t g, std::size_t jmax) {
  if (g >= run.sizes.size()) throw DomainError("cell_estimates: grid index out of range");
  std::vector<std::size_t> counts(jmax + 1, 0);
  for (auto z : run.sizes[g])
    if (z <= jmax) ++counts[z];
  std::vector<MCEstimate> out;
  for (auto c : counts) out.push_back(proportion(c, run.n(), run.seed));
  return out;
}

MCEstimate mean_size(const GridRun& run, std::size_t g) {
  if (g >= run.sizes.size()) throw DomainError("mean_size: grid index out of range");
  double sum = 0.0, sum2 = 0.0;
  for (auto z : run.sizes[g]) {
    if (z == kAboveCap) throw NumericalError("mean_size: censored paths present");
    const auto x = static_cast<double>(z);
    sum += x;
    sum2 += x * x;
  }
  const auto n = static_cast<double>(run.n());
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n), run.n(), run.seed};
}

MCEstimate mean_extinction_time(const GridRun& run) {
  double sum = 0.0, sum2 = 0.0;
  std::size_t m = 0;
  for (double h : run.extinction_time) {
    if (h == kNotExtinct) continue;
    sum += h;
    sum2 += h * h;
    ++m;
  }
  if (m == 0) throw NumericalError("mean_extinction_time: no path went extinct");
  const auto n = static_cast<double>(m);
  const double mean = sum / n;
  const double var = m > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n), m, run.seed};
}

double EmpiricalCDF::operator()(double x) const {
  const auto it = std::upper_bound(sample.begin(), sample.end(), x);
  return static_cast<double>(it - sample.begin()) / static_cast<double>(sample.size());
}

double EmpiricalCDF::dkw_band(double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("dkw_band: alpha must lie in (0,1)");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(sample.size())));
}

EmpiricalCDF empirical_D(const GridRun& run, std::size_t g, double q) {
  if (g >= run.sizes.size()) throw DomainError("empirical_D: grid index out of range");
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("empirical_D: q must lie in (0,1]");
  EmpiricalCDF e;
  e.t = run.grid[g];
  e.q = q;
  e.sample.reserve(run.n());
  for (auto z : run.sizes[g])
    e.sample.push_back(z == kAboveCap ? std::numeric_limits<double>::infinity() : q * static_cast<double>(z));
  std::sort(e.sample.begin(), e.sample.end());
  return e;
}

EmpiricalCDF empirical_D(const OffspringDistribution& dist, double t, double q, const MCConfig& cfg) {
  const double grid[] = {t};
  return empirical_D(run_grid(ProcessKind::QProcess, dist, grid, cfg), 0, q);
}

double ks_distance(const EmpiricalCDF& emp, const std::function<double(double)>& D) {
  const auto& xs = emp.sample;
  const auto n = static_cast<double>(xs.size());
  double sup = 0.0;
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i;
    while (j < xs.size() && xs[j] == xs[i]) ++j;
    if (!std::isfinite(xs[i])) {
      // censored mass sits above every finite x
      sup = std::max(sup, 1.0 - static_cast<double>(i) / n);
      break;
    }
    const double d = D(xs[i]);
    sup = std::max({sup, std::abs(static_cast<double>(i) / n - d), std::abs(static_cast<double>(j) / n - d)});
    i = j;
  }
  return sup;
}

}  // namespace critlab
