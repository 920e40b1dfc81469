#include <doctest.h>

#include <cmath>

#include "critlab/error.hpp"
#include "critlab/kolmogorov.hpp"
#include "critlab/series.hpp"
#include "oracles.hpp"

using namespace critlab;

namespace {
ScaleFunction constant_l(double a0 = 1.0) { return make_scale_function({0.5, a0, Family::ConstantL}); }
ScaleFunction delta_l(double a0 = 1.0) { return make_scale_function({0.5, a0, Family::DeltaEqualsLambda}); }
}  // namespace

TEST_SUITE("kolmogorov") {
  TEST_CASE("ConstantL ODE against the closed form") {
    const auto sf = constant_l();
    for (double t : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
      const auto r = solve_F(sf, 0.0, t);
      CHECK(r.value == doctest::Approx(std::pow(1 + t / 2, -2.0)).epsilon(1e-8));
    }
  }

  TEST_CASE("DeltaEqualsLambda against an independent ODE") {
    const auto sf = delta_l();
    CHECK(solve_F(sf, 0.0, 1.0).value == doctest::Approx(oracle::kDeltaR_t1_s0).epsilon(1e-9));
    CHECK(solve_F(sf, 0.5, 1.0).value == doctest::Approx(oracle::kDeltaR_t1_s05).epsilon(1e-9));
    CHECK(solve_F(sf, 0.0, 10.0).value == doctest::Approx(oracle::kDeltaR_t10_s0).epsilon(1e-9));
    CHECK(solve_F(sf, 0.5, 10.0).value == doctest::Approx(oracle::kDeltaR_t10_s05).epsilon(1e-9));
    CHECK(exact_R_deltaL(sf.params(), 0.0, 10.0).value == doctest::Approx(oracle::kDeltaR_t10_s0).epsilon(1e-12));
  }

  TEST_CASE("closed form and ODE agree") {
    const auto sf = delta_l();
    for (double s : {0.0, 0.5, 0.9})
      for (double t : {0.1, 1.0, 10.0, 100.0, 1000.0})
        CHECK(solve_F(sf, s, t).value == doctest::Approx(exact_R_deltaL(sf.params(), s, t).value).epsilon(1e-7));
  }

  TEST_CASE("w(t) / (nu t) -> 1") {
    const auto sf = delta_l();
    for (double t : {1e6, 1e8}) {
      const double w = 1.0 / sf.Lambda(exact_R_deltaL(sf.params(), 0.0, t).value);
      CHECK(w / (0.5 * t) == doctest::Approx(1.0).epsilon(0.01));
    }
  }

  TEST_CASE("domain checks") {
    CHECK_THROWS_AS(solve_F(constant_l(), 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(solve_F(constant_l(), 0.0, -1.0), DomainError);
    SolveConfig bad;
    bad.rel_tol = 1e-20;
    CHECK_THROWS_AS(bad.validate(), DomainError);
  }

  TEST_CASE("mho") {
    const auto sf = delta_l();
    CHECK(mho(sf, 0.0, 10.0) == doctest::Approx(oracle::kDeltaMho_t10).epsilon(1e-8));
    CHECK(mho(constant_l(), 0.0, 10.0) == 0.0);
    double prev = 1e300;
    for (double t : {10.0, 100.0, 1e3, 1e4, 1e5, 1e6}) {
      const double r = mho(sf, 0.0, t) / t;
      CHECK(r < prev);
      prev = r;
    }
  }

  TEST_CASE("identity residual") {
    SolveConfig tight;
    tight.rel_tol = 1e-11;
    for (double t : {1.0, 10.0, 100.0, 1000.0}) {
      CHECK(std::abs(identity_lemma2_residual(constant_l(), 0.5, t, tight)) <= 1e-8);
      CHECK(std::abs(identity_lemma2_residual(delta_l(), 0.0, t)) <= 1e-6);
    }
  }

  TEST_CASE("nu_ts") {
    const auto sf = delta_l();
    CHECK(nu_ts(sf, 0.0, 4.0) == doctest::Approx(sf.Lambda(1.0) * 0.5 * 4.0 + 1.0));
  }

  TEST_CASE("G") {
    CHECK(G_of(constant_l(), 0.5, 1.0) == doctest::Approx(oracle::kConstG_t1_s05).epsilon(1e-9));
    const auto sf = delta_l();
    for (double s : {0.1, 0.5, 0.9}) {
      const double g = G_of(sf, s, 3.0);
      CHECK(g > 0.0);
      CHECK(g < 1.0);
    }
  }

  TEST_CASE("series evolution") {
    const auto sf = delta_l(0.1);
    const auto st = evolve_series(sf, 512, 2.0);
    const double q = solve_F(sf, 0.0, 2.0).value;
    CHECK(st.coeffs[0] == doctest::Approx(1.0 - q).epsilon(1e-10));
    CHECK(st.coeffs[1] == doctest::Approx(oracle::kDeltaP11_t2).epsilon(1e-8));
    CHECK(st.mass_defect >= 0.0);
    for (double c : st.coeffs) CHECK(c >= -1e-14);

    const auto ser = evolve_series(sf, 512, 2.0, {}, series::Exec::Serial);
    for (std::size_t j = 0; j <= 512; ++j) CHECK(ser.coeffs[j] == doctest::Approx(st.coeffs[j]).epsilon(1e-12).scale(1e-15));
  }

  TEST_CASE("P_11 from the series at t = 10 and 100") {
    const auto sf = constant_l();
    for (double t : {10.0, 100.0}) {
      const auto st = evolve_series(sf, 1024, t);
      const double q = std::pow(1 + t / 2, -2.0);
      CHECK(st.coeffs[1] == doctest::Approx(q * sf.Lambda(q)).epsilon(1e-8));
    }
  }

  TEST_CASE("mass beyond the truncation is reported") {
    SolveConfig cfg;
    cfg.mass_defect_max = 1e-12;
    CHECK_THROWS_AS(evolve_series(constant_l(), 64, 10.0, cfg), NumericalError);
  }

  TEST_CASE("transition and Q matrices") {
    const auto sf = constant_l();
    const auto st = evolve_series(sf, 256, 1.0);
    const auto P = transition_matrix(st, 20, 100);
    for (unsigned i = 1; i <= 20; ++i) {
      CHECK(P[i - 1][0] == doctest::Approx(std::pow(st.coeffs[0], i)).epsilon(1e-12));
      const auto row = transition_row(st, i, 100);
      for (std::size_t j = 0; j <= 100; ++j) CHECK(row[j] == doctest::Approx(P[i - 1][j]).epsilon(1e-11).scale(1e-15));
    }
    const auto Q = q_matrix(st, 5, 256);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(Q.q[i][0] == 0.0);
      CHECK(std::abs(Q.row_defect[i]) <= Q.defect_bound[i] + 1e-12);
    }
    CHECK(Q.q[0][3] == doctest::Approx(3.0 * st.coeffs[3]));
  }

  TEST_CASE("invariant measure coefficients") {
    const auto mu = mbp_invariant_coeffs(constant_l(), 10);
    CHECK(mu[0] == 0.0);
    // 1/f = (1-s)^{-3/2}: mu_j = binom(j - 1/2, j - 1) / j
    CHECK(mu[1] == doctest::Approx(1.0));
    CHECK(mu[2] == doctest::Approx(1.5 / 2));
    CHECK(mu[3] == doctest::Approx(1.875 / 3));
  }
}
