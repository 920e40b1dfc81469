#include <benchmark/benchmark.h>

#include <vector>

#include "critlab/asymptotics.hpp"
#include "critlab/simulator.hpp"

using namespace critlab;

namespace {

const ScaleFunction& model() {
  static const ScaleFunction sf = make_scale_function({0.5, 1.0, Family::ConstantL});
  return sf;
}

series::Exec exec_of(const benchmark::State& st) {
  return st.range(1) ? series::Exec::Parallel : series::Exec::Serial;
}

void BM_multiply(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  std::vector<double> a(n), b(n), out(n);
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = 1.0 / (k + 1.0);
    b[k] = 1.0 / ((k + 1.0) * (k + 2.0));
  }
  for (auto _ : st) {
    series::multiply(a, b, out, exec_of(st));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_multiply)->ArgsProduct({{1024, 4096}, {0, 1}})->ArgNames({"J", "par"});

void BM_run_grid(benchmark::State& st) {
  const OffspringDistribution dist(model());
  MCConfig cfg;
  cfg.n = static_cast<std::size_t>(st.range(0));
  cfg.seed = 7;
  cfg.sim.population_cap = 100000;
  cfg.exec = exec_of(st);
  const std::vector<double> grid{1.0, 2.0};
  for (auto _ : st) benchmark::DoNotOptimize(run_grid(ProcessKind::Branching, dist, grid, cfg).events);
}
BENCHMARK(BM_run_grid)->ArgsProduct({{20000}, {0, 1}})->ArgNames({"n", "par"})->Unit(benchmark::kMillisecond);

void BM_delta_sup(benchmark::State& st) {
  const auto theta = default_theta_grid();
  for (auto _ : st)
    benchmark::DoNotOptimize(delta_sup(model(), 1e4, theta, {}, exec_of(st)).value);
}
BENCHMARK(BM_delta_sup)->ArgsProduct({{0}, {0, 1}})->ArgNames({"_", "par"})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
