#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "critlab/branching_model.hpp"
#include "critlab/error.hpp"
#include "oracles.hpp"

using namespace critlab;

namespace {
ScaleFunction constant_l(double a0 = 1.0) { return make_scale_function({0.5, a0, Family::ConstantL}); }
ScaleFunction delta_l(double a0 = 1.0) { return make_scale_function({0.5, a0, Family::DeltaEqualsLambda}); }
}  // namespace

TEST_SUITE("branching") {
  TEST_CASE("offspring intensities") {
    const auto c = expand_coeffs(constant_l(), 16).coeffs;
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(c[1] == doctest::Approx(-1.5));
    CHECK(c[2] == doctest::Approx(0.375));
    CHECK(c[3] == doctest::Approx(0.0625));

    const auto b = expand_coeffs(make_scale_function({0.5, 1.0, Family::BinarySplitBaseline}), 4).coeffs;
    CHECK(b[0] == 1.0);
    CHECK(b[1] == -2.0);
    CHECK(b[2] == 1.0);
    CHECK(b[3] == 0.0);

    const auto d = expand_coeffs(delta_l(0.1), 16).coeffs;
    const double ref[] = {oracle::kDeltaCoeff0, oracle::kDeltaCoeff1, oracle::kDeltaCoeff2, oracle::kDeltaCoeff3,
                          oracle::kDeltaCoeff4, oracle::kDeltaCoeff5, oracle::kDeltaCoeff6};
    for (int j = 0; j < 7; ++j) CHECK(d[j] == doctest::Approx(ref[j]).epsilon(1e-12));
  }

  TEST_CASE("an invalid mechanism is rejected") {
    // a_3 < 0 at nu = 1/2, a0 = 1
    CHECK_THROWS_AS(expand_coeffs(delta_l(1.0), 16), DomainError);
  }

  TEST_CASE("mass deficit decreases with J") {
    for (const auto& sf : {constant_l(), delta_l(0.1)}) {
      double prev = 1.0;
      for (std::size_t J : {16, 64, 256, 1024}) {
        const auto oc = expand_coeffs(sf, J);
        CHECK(oc.mass_deficit < prev);
        prev = oc.mass_deficit;
      }
    }
  }

  TEST_CASE("coefficients reproduce f") {
    for (const auto& sf : {constant_l(), delta_l(0.1)}) {
      const auto oc = expand_coeffs(sf, 2048);
      for (double s : {0.1, 0.5, 0.9, 0.99}) {
        double sum = 0.0, p = 1.0;
        for (double a : oc.coeffs) sum += a * p, p *= s;
        CHECK(std::abs(sum - f_of(sf, s)) <= 2.0 * oc.mass_deficit + 1e-14);
      }
    }
  }

  TEST_CASE("closed-form coefficients and tails") {
    const auto sf = constant_l();
    const auto oc = expand_coeffs(sf, 64);
    for (std::uint64_t k : {2, 10, 64}) CHECK(exact_coeff(sf, k) == doctest::Approx(oc.coeffs[k]).epsilon(1e-12));
    CHECK(tail_mass(sf, 65) == doctest::Approx(oc.mass_deficit).epsilon(1e-8));
  }

  TEST_CASE("binary split draws") {
    const OffspringDistribution dist(make_scale_function({0.5, 1.0, Family::BinarySplitBaseline}));
    Rng rng(7);
    int zeros = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const auto k = sample_offspring(dist, rng);
      REQUIRE((k == 0 || k == 2));
      zeros += k == 0;
    }
    CHECK(std::abs(zeros / double(n) - 0.5) <= 4.0 * std::sqrt(0.25 / n));
  }

  TEST_CASE("ConstantL draws match p_k") {
    const auto sf = constant_l();
    const OffspringDistribution dist(sf);
    const auto oc = expand_coeffs(sf, 16);
    Rng rng(11);
    const int n = 1000000;
    std::vector<int> hits(11, 0);
    for (int i = 0; i < n; ++i) {
      const auto k = dist.sample(rng);
      REQUIRE(k != 1);
      if (k <= 10) ++hits[k];
    }
    for (int k = 0; k <= 10; ++k) {
      if (k == 1) continue;
      const double p = oc.coeffs[k] / 1.5;
      CHECK(dist.prob(k) == doctest::Approx(p).epsilon(1e-12));
      CHECK(std::abs(hits[k] / double(n) - p) <= 4.0 * std::sqrt(p * (1 - p) / n));
    }
  }

  TEST_CASE("tail index of the draws") {
    // p_k ~ k^{-(2+nu)}: the survival function has index 1 + nu, so a Hill
    // estimate alpha on the top 1% gives 1 + alpha ~ 2 + nu. Integer draws tie
    // at the threshold u, so only strict exceedances of u enter.
    const OffspringDistribution dist(constant_l());
    Rng rng(13);
    const int n = 1000000;
    std::vector<double> x(n);
    for (auto& v : x) v = static_cast<double>(dist.sample(rng));
    std::sort(x.begin(), x.end(), std::greater<>());
    const double u = x[n / 100];
    double h = 0.0;
    int m = 0;
    for (; x[m] > u; ++m) h += std::log(x[m] / u);
    const double alpha = m / h;
    CHECK(std::abs(1.0 + alpha - 2.5) <= 0.1);
  }

  TEST_CASE("size-biased law and Q-process row sums") {
    const OffspringDistribution dist(constant_l());
    for (std::uint64_t i : {1, 2, 10, 100, 1000})
      CHECK(dist.qprocess_row_sum(i) == doctest::Approx(1.0).epsilon(1e-10));
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) CHECK(dist.sample_size_biased(rng) >= 2);
  }

  TEST_CASE("finite mechanism") {
    const auto death = OffspringDistribution::finite({1.0, -1.0});
    Rng rng(1);
    for (int i = 0; i < 100; ++i) CHECK(death.sample(rng) == 0);
    CHECK_THROWS_AS(death.sample_size_biased(rng), DomainError);
    CHECK_THROWS_AS(OffspringDistribution::finite({1.0, 1.0}), DomainError);
  }

  TEST_CASE("alias table") {
    const std::vector<double> w{1.0, 0.0, 3.0};
    const AliasTable t(w);
    Rng rng(5);
    int twos = 0;
    for (int i = 0; i < 40000; ++i) {
      const auto k = t.sample(rng);
      REQUIRE(k != 1);
      twos += k == 2;
    }
    CHECK(std::abs(twos / 40000.0 - 0.75) < 4.0 * std::sqrt(0.75 * 0.25 / 40000));
    CHECK_THROWS_AS(AliasTable(std::vector<double>{}), DomainError);
  }
}
