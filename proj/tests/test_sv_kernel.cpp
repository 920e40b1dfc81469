#include <doctest.h>

#include <cmath>

#include "critlab/error.hpp"
#include "critlab/sv_kernel.hpp"
#include "oracles.hpp"

using namespace critlab;

namespace {
ScaleFunction constant_l(double a0 = 1.0) { return make_scale_function({0.5, a0, Family::ConstantL}); }
ScaleFunction delta_l(double a0 = 1.0) { return make_scale_function({0.5, a0, Family::DeltaEqualsLambda}); }
}  // namespace

TEST_SUITE("sv_kernel") {
  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(make_scale_function({1.0, 1.0, Family::ConstantL}), DomainError);
    CHECK_THROWS_AS(make_scale_function({0.0, 1.0, Family::DeltaEqualsLambda}), DomainError);
    CHECK_THROWS_AS(make_scale_function({0.5, 0.0, Family::ConstantL}), DomainError);
    CHECK(make_scale_function({0.3, 2.0, Family::BinarySplitBaseline}).nu() == 1.0);
  }

  TEST_CASE("unknown family names the field") {
    try {
      family_from_string("Gamma");
      FAIL("no throw");
    } catch (const ConfigError& e) {
      CHECK(e.field() == "family");
    }
    CHECK(family_from_string(to_string(Family::DeltaEqualsLambda)) == Family::DeltaEqualsLambda);
  }

  TEST_CASE("ConstantL evaluators") {
    const auto sf = constant_l(2.0);
    CHECK(sf.L(123.0) == 2.0);
    CHECK(sf.Lambda(0.25) == doctest::Approx(1.0));
    CHECK(sf.delta(0.3) == 0.0);
    CHECK(sf.f_complement(0.25) == doctest::Approx(0.25));
  }

  TEST_CASE("DeltaEqualsLambda: local index deviation equals Lambda") {
    const auto sf = delta_l(0.7);
    for (double y : {0.01, 0.1, 0.5, 0.9}) {
      const double h = 1e-6 * y;
      const double dlog = (std::log(sf.Lambda(y + h)) - std::log(sf.Lambda(y - h))) / (2 * h);
      CHECK(y * dlog - 0.5 == doctest::Approx(sf.delta(y)).epsilon(1e-7));
      CHECK(sf.delta(y) == doctest::Approx(sf.Lambda(y)));
    }
    CHECK(sf.Lambda(1.0) == doctest::Approx(0.7));
  }

  TEST_CASE("remainder_rho") {
    CHECK(remainder_rho(constant_l(), 3.0, 10.0) == 0.0);
    const auto sf = delta_l();
    double prev = std::abs(remainder_rho(sf, 2.0, 10.0));
    for (double x : {1e2, 1e4, 1e6, 1e8}) {
      const double r = std::abs(remainder_rho(sf, 2.0, x));
      CHECK(r < prev);
      prev = r;
    }
    CHECK(prev < 1e-4);
    CHECK_THROWS_AS(remainder_rho(sf, 0.0, 10.0), DomainError);
  }

  TEST_CASE("normalizer") {
    CHECK(solve_normalizer(constant_l(2.0), 7.0).value == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(solve_normalizer(delta_l(), 100.0).value == doctest::Approx(oracle::kDeltaNormalizer_t100).epsilon(1e-10));
    CHECK_THROWS_AS(solve_normalizer(delta_l(), 0.0), DomainError);
  }

  TEST_CASE("invariant measure generating function") {
    const auto c = constant_l(2.0);
    for (double s : {0.0, 0.3, 0.9}) CHECK(invariant_measure_M(c, s) == doctest::Approx((std::pow(1 - s, -0.5) - 1) / 0.5 / 2.0));
    CHECK(invariant_measure_M(delta_l(), 0.5) == doctest::Approx(oracle::kDeltaM_s05).epsilon(1e-10));
    CHECK_THROWS_AS(invariant_measure_M(delta_l(), 1.0), DomainError);
  }

  TEST_CASE("V and U are inverse") {
    for (const auto& sf : {constant_l(), delta_l()}) {
      CHECK(pakes_V(sf, 1.0) == doctest::Approx(0.0));
      for (double x : {1.5, 10.0, 1e4}) CHECK(pakes_U(sf, pakes_V(sf, x)) == doctest::Approx(x).epsilon(1e-9));
    }
  }

  TEST_CASE("lemma3 ratio") {
    auto K = [](double y) { return std::sqrt(y); };
    CHECK(lemma3_ratio(constant_l(), 0.01, K) == 0.0);
    // (L(1/phi)/L(1/y) - 1)/Lambda(y) stays bounded as y -> 0 with K -> 0
    const auto sf = delta_l();
    double prev = 0.0;
    for (double y : {1e-2, 1e-4, 1e-6}) {
      const double r = lemma3_ratio(sf, y, K);
      CHECK(std::isfinite(r));
      CHECK(std::abs(r) < 10.0);
      if (prev != 0.0) CHECK(std::abs(r) < std::abs(prev));
      prev = r;
    }
  }
}
