#include <doctest.h>

#include <chrono>
#include <cmath>
#include <sstream>

#include "critlab/acceptance.hpp"
#include "critlab/error.hpp"
#include "critlab/harness.hpp"

using namespace critlab;

namespace {
const char* kMinimal = R"(# minimal
family = ConstantL
nu = 0.5
a0 = 1
t_list = 1, 10
s_list = 0
)";

std::string csv(const std::vector<harness::ReportRow>& rows) {
  std::ostringstream out;
  harness::write_csv(out, rows);
  return out.str();
}
}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("minimal solve") {
    const auto cfg = harness::parse_config_string(kMinimal);
    const auto rows = harness::solve_rows(cfg);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
      CHECK(r.exact == doctest::Approx(std::pow(1 + r.t / 2, -2.0)).epsilon(1e-8));
      CHECK(r.method == "ode");
      CHECK(r.equation == "1.13");
    }
    CHECK(csv(rows) == csv(harness::solve_rows(cfg)));
    CHECK(csv(rows).rfind("experiment,equation,t,exact,predicted,normalized_error,method,stderr\n", 0) == 0);
  }

  TEST_CASE("solve with G and series rows") {
    auto cfg = harness::parse_config_string(
        "family = DeltaEqualsLambda\na0 = 0.1\nt_list = 2, 20\ns_list = 0, 0.5\nseries_J = 256\n");
    const auto rows = harness::solve_rows(cfg);
    CHECK(rows.size() == 2 * (1 + 2) + 2);
  }

  TEST_CASE("config diagnostics") {
    auto field_of = [](const std::string& text) {
      try {
        harness::parse_config_string(text);
      } catch (const ConfigError& e) {
        return e.field() + "|" + e.what();
      }
      return std::string("no error");
    };
    const auto fam = field_of("nu = 0.5\nfamily = Gamma\n");
    CHECK(fam.rfind("family|", 0) == 0);
    CHECK(fam.find(":2:") != std::string::npos);
    CHECK(field_of("colour = red\n").rfind("colour|", 0) == 0);
    CHECK(field_of("nu = 0.5\nnu = 0.4\n").rfind("nu|", 0) == 0);
    CHECK(field_of("nu = half\n").rfind("nu|", 0) == 0);
    CHECK(field_of("s_list = 0.5, 0.2\n").rfind("s_list|", 0) == 0);
    CHECK(field_of("t_min = 10\nt_max = 1\n").rfind("t_max|", 0) == 0);
    CHECK(field_of("band.9.99 = 0.1\n").rfind("band.9.99|", 0) == 0);
    CHECK(field_of("just text\n").find("expected 'key = value'") != std::string::npos);
  }

  TEST_CASE("simulate needs a seed") {
    auto cfg = harness::parse_config_string(kMinimal);
    CHECK_THROWS_AS(harness::simulate_rows(cfg), ConfigError);
  }

  TEST_CASE("simulate: smoke run, stderr column, determinism") {
    auto cfg = harness::parse_config_string("family = ConstantL\nt_list = 1, 2\nmc_n = 1000\nseed = 17\njmax = 3\n");
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = harness::simulate_rows(cfg);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 5.0);
    for (const auto& r : rows) {
      REQUIRE(r.std_error);
      CHECK(r.method == "mc");
      CHECK(*r.std_error == doctest::Approx(std::sqrt(r.exact * (1 - r.exact) / 1000)));
    }
    CHECK(rows[0].predicted);
    CHECK(std::abs(*rows[0].normalized_error) < 4.0);
    CHECK(csv(rows) == csv(harness::simulate_rows(cfg)));
  }

  TEST_CASE("simulate: trajectory dump replays the run") {
    auto cfg = harness::parse_config_string(
        "family = ConstantL\nt_list = 3\nmc_n = 50\nseed = 3\nprocess = qprocess\ndump_trajectories = 4\nseries_J = 512\n");
    std::ostringstream dump;
    const auto rows = harness::simulate_rows(cfg, &dump);
    std::istringstream in(dump.str());
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
      CHECK(line.find("\"process\":\"qprocess\"") != std::string::npos);
      ++n;
    }
    CHECK(n == 4);
    CHECK(rows.front().experiment.find("P(W=1)") != std::string::npos);
    CHECK(rows.front().predicted);
  }

  TEST_CASE("csv round trip") {
    const auto rows = harness::solve_rows(harness::parse_config_string(kMinimal));
    std::istringstream in(csv(rows));
    const auto back = harness::read_csv(in);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(back[i].exact == rows[i].exact);
      CHECK(back[i].predicted == rows[i].predicted);
      CHECK_FALSE(back[i].std_error);
    }
    const auto sum = harness::summarize(back);
    CHECK(sum.size() == 1);
    CHECK(sum[0].rows == 2);
  }

  TEST_CASE("rate fits") {
    auto cfg = harness::parse_config_string("family = DeltaEqualsLambda\nt_min = 1e4\nt_max = 1e8\nt_points = 9\n");
    const auto fits = harness::rate_rows(cfg);
    REQUIRE(fits.size() == 3);
    for (const auto& f : fits) {
      CHECK(f.accepted);
      CHECK(f.axis == "log_t_over_t");
    }
    auto c2 = harness::parse_config_string("family = ConstantL\nt_min = 1e2\nt_max = 1e6\nt_points = 9\n");
    const auto f2 = harness::rate_rows(c2);
    CHECK(f2[0].slope == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(f2[0].constant == doctest::Approx(*f2[0].expected_constant).epsilon(0.05));
    CHECK_THROWS_AS(harness::rate_rows(harness::parse_config_string(kMinimal)), ConfigError);
  }

  TEST_CASE("acceptance selection") {
    const auto one = acceptance::select("1.23");
    REQUIRE(one.size() == 1);
    CHECK(one[0]->id == 7);
    CHECK(acceptance::select("7")[0]->tag == "1.23");
    CHECK(acceptance::select("").size() == 12);
    CHECK(acceptance::select("1,1.3").size() == 2);
    CHECK_THROWS_AS(acceptance::select("9.9"), ConfigError);
  }

  TEST_CASE("a tightened band is an expected failure") {
    acceptance::Options o;
    o.overrides["band.1.14"] = 0.01;
    o.overrides["t_eval.1.14"] = 1e4;
    const auto out = acceptance::run(*acceptance::select("1.14")[0], o);
    CHECK_FALSE(out.passed);
    CHECK_FALSE(out.numerical_failure);
    CHECK(out.summary.find("MISSED") != std::string::npos);
    acceptance::Options d;
    CHECK(acceptance::run(*acceptance::select("1.14")[0], d).passed);
  }

  TEST_CASE("exit codes") {
    acceptance::Outcome ok, bad, num;
    ok.passed = true;
    num.numerical_failure = true;
    CHECK(acceptance::exit_code({ok}) == 0);
    CHECK(acceptance::exit_code({ok, bad}) == 1);
    CHECK(acceptance::exit_code({bad, num}) == 3);
  }
}
