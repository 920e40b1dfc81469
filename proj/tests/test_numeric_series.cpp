#include <doctest.h>

#include <cmath>
#include <random>

#include "critlab/error.hpp"
#include "critlab/numeric.hpp"
#include "critlab/series.hpp"

using namespace critlab;

TEST_SUITE("numeric") {
  TEST_CASE("find_root on a bracket") {
    const auto r = numeric::find_root([](double x) { return x * x - 2.0; }, 0.0, 2.0);
    CHECK(r.root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }

  TEST_CASE("find_root rejects a non-bracket") {
    CHECK_THROWS_AS(numeric::find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), NumericalError);
  }

  TEST_CASE("expand_upward finds a sign change") {
    const auto b = numeric::expand_upward([](double x) { return x - 1000.0; }, 0.0, 1.0);
    CHECK(b.lo <= 1000.0);
    CHECK(b.hi >= 1000.0);
  }

  TEST_CASE("integrate") {
    CHECK(numeric::integrate([](double x) { return std::sin(x); }, 0.0, M_PI) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(numeric::integrate([](double x) { return 1.0 / std::sqrt(x); }, 1e-12, 1.0) ==
          doctest::Approx(2.0 - 2e-6).epsilon(1e-6));
  }

  TEST_CASE("log_grid and least squares") {
    const auto g = numeric::log_grid(1.0, 100.0, 3);
    REQUIRE(g.size() == 3);
    CHECK(g[1] == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(g[2] == 100.0);
    const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    const auto f = numeric::least_squares(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
  }
}

TEST_SUITE("series") {
  std::vector<double> random_series(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
  }

  TEST_CASE("serial and parallel multiply agree") {
    const auto a = random_series(700, 1), b = random_series(700, 2);
    std::vector<double> s(700), p(700);
    series::multiply_serial(a, b, s);
    series::multiply_parallel(a, b, p);
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(p[j] == doctest::Approx(s[j]).epsilon(1e-13).scale(1.0));
  }

  TEST_CASE("reciprocal of 1 - s") {
    const std::vector<double> a{1.0, -1.0};
    std::vector<double> out(8);
    series::reciprocal(a, out);
    for (double c : out) CHECK(c == doctest::Approx(1.0));
  }

  TEST_CASE("power matches the binomial series") {
    const std::vector<double> g{1.0, -1.0};
    std::vector<double> out(20);
    series::power(g, 1.5, out);
    const auto ref = series::binomial_series(1.5, 19);
    for (std::size_t k = 0; k < 20; ++k) CHECK(out[k] == doctest::Approx(ref[k]).epsilon(1e-13).scale(1e-16));
    CHECK(ref[1] == doctest::Approx(-1.5));
    CHECK(ref[2] == doctest::Approx(0.375));
    CHECK(ref[3] == doctest::Approx(0.0625));
  }

  TEST_CASE("divide inverts multiply") {
    auto a = random_series(50, 3), b = random_series(50, 4);
    b[0] = 2.0;
    std::vector<double> prod(50), back(50);
    series::multiply(a, b, prod);
    series::divide(prod, b, back);
    for (std::size_t j = 0; j < 50; ++j) CHECK(back[j] == doctest::Approx(a[j]).epsilon(1e-9).scale(1.0));
  }

  TEST_CASE("powers and integer_power agree") {
    const std::vector<double> g{0.3, 0.5, 0.2};
    const auto rows = series::powers(g, 9, 12, series::Exec::Serial);
    const auto par = series::powers(g, 9, 12, series::Exec::Parallel);
    for (unsigned i = 1; i <= 9; ++i) {
      const auto direct = series::integer_power(g, i, 12);
      for (std::size_t j = 0; j <= 12; ++j) {
        CHECK(rows[i - 1][j] == doctest::Approx(direct[j]).epsilon(1e-13).scale(1e-16));
        CHECK(par[i - 1][j] == doctest::Approx(rows[i - 1][j]).epsilon(1e-13).scale(1e-16));
      }
    }
  }
}
