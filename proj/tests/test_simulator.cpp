#include <doctest.h>
#include <omp.h>

#include <cmath>

#include "critlab/asymptotics.hpp"
#include "critlab/error.hpp"
#include "critlab/simulator.hpp"

using namespace critlab;

namespace {
ScaleFunction constant_l(double a0 = 1.0) { return make_scale_function({0.5, a0, Family::ConstantL}); }
}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("pure death: extinction time is a sum of exponentials") {
    const auto death = OffspringDistribution::finite({1.0, -1.0});
    MCConfig cfg;
    cfg.n = 20000;
    cfg.seed = 99;
    cfg.i0 = 5;
    const std::vector<double> grid{100.0};
    const auto run = run_grid(ProcessKind::Branching, death, grid, cfg);
    const auto m = mean_extinction_time(run);
    const double expect = 1.0 + 1.0 / 2 + 1.0 / 3 + 1.0 / 4 + 1.0 / 5;
    CHECK(std::abs(m.value - expect) <= 4.0 * m.std_error);
    CHECK(survival_estimates(run)[0].value == 0.0);
  }

  TEST_CASE("binary split survival") {
    const OffspringDistribution dist(make_scale_function({1.0, 1.0, Family::BinarySplitBaseline}));
    MCConfig cfg;
    cfg.n = 20000;
    cfg.seed = 5;
    const std::vector<double> grid{1.0, 3.0};
    const auto est = survival_estimates(run_grid(ProcessKind::Branching, dist, grid, cfg));
    CHECK(std::abs(est[0].value - 0.5) <= 4.0 * est[0].std_error);
    CHECK(std::abs(est[1].value - 0.25) <= 4.0 * est[1].std_error);
  }

  TEST_CASE("trajectories") {
    const OffspringDistribution dist(constant_l());
    Rng rng(1);
    const auto tr = simulate_mbp(dist, 3, 5.0, rng);
    REQUIRE(tr.times.size() == tr.sizes.size());
    CHECK(tr.sizes.front() == 3);
    CHECK(tr.size_at(0.0) == 3);
    for (std::size_t k = 1; k < tr.times.size(); ++k) CHECK(tr.times[k] > tr.times[k - 1]);
    if (tr.extinct()) CHECK(tr.sizes.back() == 0);
    CHECK_THROWS_AS(tr.size_at(6.0), DomainError);
    Rng r2(1);
    const auto q = simulate_qprocess(dist, 1, 2.0, r2);
    CHECK_FALSE(q.extinct());
    for (auto s : q.sizes) CHECK(s >= 1);
  }

  TEST_CASE("same seed, same estimates; serial equals parallel") {
    const OffspringDistribution dist(constant_l());
    MCConfig cfg;
    cfg.n = 3000;
    cfg.seed = 2024;
    cfg.chunk = 256;
    cfg.sim.population_cap = 100000;
    const std::vector<double> grid{0.5, 2.0};
    const auto a = run_grid(ProcessKind::QProcess, dist, grid, cfg);
    const auto b = run_grid(ProcessKind::QProcess, dist, grid, cfg);
    cfg.exec = series::Exec::Serial;
    const auto c = run_grid(ProcessKind::QProcess, dist, grid, cfg);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(4);
    cfg.exec = series::Exec::Parallel;
    const auto d = run_grid(ProcessKind::QProcess, dist, grid, cfg);
    omp_set_num_threads(saved);
    CHECK(a.sizes == b.sizes);
    CHECK(a.sizes == c.sizes);
    CHECK(a.sizes == d.sizes);
    CHECK(a.events == d.events);
  }

  TEST_CASE("Q-process cells match the engine") {
    const auto sf = constant_l();
    const OffspringDistribution dist(sf);
    MCConfig cfg;
    cfg.n = 20000;
    cfg.seed = 8;
    cfg.sim.population_cap = 100000;
    const std::vector<double> grid{1.0};
    const auto cells = cell_estimates(run_grid(ProcessKind::QProcess, dist, grid, cfg), 0, 5);
    const auto st = evolve_series(sf, 256, 1.0);
    CHECK(cells[0].value == 0.0);
    for (std::size_t j = 1; j <= 5; ++j) {
      const double p = j * st.coeffs[j];
      CHECK(std::abs(cells[j].value - p) <= 4.0 * std::sqrt(p * (1 - p) / cfg.n));
    }
  }

  TEST_CASE("estimators") {
    const auto e = proportion(30, 100, 1);
    CHECK(e.value == doctest::Approx(0.3));
    CHECK(e.std_error == doctest::Approx(std::sqrt(0.3 * 0.7 / 100)));
    EmpiricalCDF F;
    F.sample = {0.5};
    CHECK(F(0.4) == 0.0);
    CHECK(F(0.5) == 1.0);
    CHECK(ks_distance(F, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.5));
    F.sample.assign(1000, 1.0);
    CHECK(F.dkw_band(0.05) == doctest::Approx(std::sqrt(std::log(2 / 0.05) / 2000)));
  }

  TEST_CASE("event budget") {
    const OffspringDistribution dist(constant_l());
    MCConfig cfg;
    cfg.n = 2000;
    cfg.seed = 1;
    cfg.max_events = 5000;
    const std::vector<double> grid{50.0};
    CHECK_THROWS_AS(run_grid(ProcessKind::QProcess, dist, grid, cfg), BudgetExceeded);
  }

  TEST_CASE("censoring") {
    const OffspringDistribution dist(constant_l());
    MCConfig cfg;
    cfg.n = 500;
    cfg.seed = 4;
    cfg.sim.population_cap = 20;
    const std::vector<double> grid{5.0};
    const auto run = run_grid(ProcessKind::QProcess, dist, grid, cfg);
    CHECK(run.censored > 0);
    CHECK_THROWS_AS(mean_size(run, 0), NumericalError);
    const auto emp = empirical_D(run, 0, 0.1);
    CHECK(std::isinf(emp.sample.back()));
  }
}
