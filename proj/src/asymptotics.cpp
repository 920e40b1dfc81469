#include "critlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <numbers>
#include <sstream>

#include "critlab/branching_model.hpp"
#include "critlab/catalog.hpp"
#include "critlab/error.hpp"

namespace critlab {

double AsymptoticPrediction::normalized_error(double exact) const {
  const double rel = exact / leading - 1.0;
  if (correction != 0.0) return rel / correction;
  return rel * t;
}

namespace {

void require_t_ge_1(double t, const char* who) {
  if (!(t >= 1.0) || !std::isfinite(t)) throw DomainError(std::string(who) + ": t must be >= 1");
}

CorrectionForm resolve(const ScaleFunction& sf, CorrectionForm form) {
  if (form == CorrectionForm::Auto)
    return sf.family() == Family::DeltaEqualsLambda ? CorrectionForm::Log : CorrectionForm::Mho;
  if (form == CorrectionForm::Log && sf.family() != Family::DeltaEqualsLambda)
    throw DomainError("the logarithmic correction applies to DeltaEqualsLambda only");
  return form;
}

double log_term(const ScaleFunction& sf, double t) {
  const double nu = sf.nu();
  return std::log1p(sf.a0() * nu * t) / (nu * nu * nu * t);
}

}  // namespace

AsymptoticPrediction predict_q(const ScaleFunction& sf, double t, CorrectionForm form, const SolveConfig& cfg) {
  require_t_ge_1(t, "predict_q");
  const double nu = sf.nu();
  AsymptoticPrediction p;
  p.t = t;
  p.leading = solve_normalizer(sf, t).value / std::pow(nu * t, 1.0 / nu);
  if (resolve(sf, form) == CorrectionForm::Log) {
    p.correction = -log_term(sf, t);
    p.formula = tags::kSurvivalLog;
  } else {
    p.correction = -mho(sf, 0.0, t, cfg) / (nu * nu * t);
    p.formula = tags::kSurvivalMho;
  }
  return p;
}

AsymptoticPrediction predict_p11(const ScaleFunction& sf, double t, CorrectionForm form, const SolveConfig& cfg) {
  require_t_ge_1(t, "predict_p11");
  const double nu = sf.nu();
  AsymptoticPrediction p;
  p.t = t;
  p.leading = solve_normalizer(sf, t).value / sf.a0();
  if (resolve(sf, form) == CorrectionForm::Log) {
    p.correction = -(1.0 + nu) * log_term(sf, t);
    p.formula = tags::kP11Log;
  } else {
    p.correction = -(1.0 + nu) / (nu * nu) * mho(sf, 0.0, t, cfg) / t;
    p.formula = tags::kP11Mho;
  }
  return p;
}

double p11_exact(const ScaleFunction& sf, double t, const SolveConfig& cfg) {
  const double q = survival_q(sf, t, cfg);
  return q * sf.Lambda(q) / sf.a0();
}

AsymptoticPrediction predict_G(const ScaleFunction& sf, double s, double t) {
  require_t_ge_1(t, "predict_G");
  const double nu = sf.nu();
  AsymptoticPrediction p;
  p.t = t;
  p.leading = pi_of(sf, s) * solve_normalizer(sf, t).value;
  if (sf.family() == Family::DeltaEqualsLambda) {
    p.correction = -(1.0 + nu) / (nu * nu * nu) * std::log1p(sf.Lambda(1.0 - s) * nu * t) / t;
    p.formula = tags::kGLog;
  } else {
    p.formula = tags::kGLeading;
  }
  return p;
}

double lemma1_ratio(const ScaleFunction& sf, double s, double t, const SolveConfig& cfg) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("lemma1_ratio: s must lie in [0,1)");
  require_t_ge_1(t, "lemma1_ratio");
  const double nu = sf.nu();
  return survival_R_c(sf, 1.0 - s, t, cfg) * std::pow(nu * t, 1.0 / nu) / solve_normalizer(sf, t).value;
}

double pi_of(const ScaleFunction& sf, double s) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("pi_of: s must lie in (0,1)");
  return s / f_of(sf, s);
}

PiMeasure pi_coeffs(const ScaleFunction& sf, std::size_t J) {
  if (J < 1) throw DomainError("pi_coeffs: J must be >= 1");
  const auto a = expand_coeffs(sf, std::max<std::size_t>(J, 2)).coeffs;
  std::vector<double> inv(J);
  series::reciprocal(a, inv);
  PiMeasure pm;
  pm.coeffs.assign(J + 1, 0.0);
  pm.partial_sums.assign(J + 1, 0.0);
  for (std::size_t j = 1; j <= J; ++j) {
    pm.coeffs[j] = inv[j - 1];
    pm.partial_sums[j] = pm.partial_sums[j - 1] + pm.coeffs[j];
  }
  return pm;
}

double tauberian_ratio(const ScaleFunction& sf, const PiMeasure& pi, std::size_t n) {
  if (n < 1 || n >= pi.partial_sums.size()) throw DomainError("tauberian_ratio: n outside the computed range");
  const double nu = sf.nu();
  const double nd = static_cast<double>(n);
  return pi.partial_sums[n] * std::tgamma(2.0 + nu) * sf.L(nd) / std::pow(nd, 1.0 + nu);
}

double psi_limit(double nu, double theta) {
  if (!(theta >= 0.0)) throw DomainError("psi_limit: theta must be >= 0");
  if (theta == 0.0) return 1.0;
  return std::pow(1.0 + std::pow(theta, nu), -(1.0 + 1.0 / nu));
}

namespace {

double psi_given_q(const ScaleFunction& sf, double q, double t, double theta, const SolveConfig& cfg) {
  const double x = theta * q;
  return G_of_c(sf, std::exp(-x), -std::expm1(-x), t, cfg);
}

}  // namespace

double psi_finite(const ScaleFunction& sf, double t, double theta, const SolveConfig& cfg) {
  require_t_ge_1(t, "psi_finite");
  if (!(theta > 0.0)) throw DomainError("psi_finite: theta must be > 0");
  return psi_given_q(sf, survival_q(sf, t, cfg), t, theta, cfg);
}

std::vector<double> default_theta_grid() { return numeric::log_grid(1e-3, 1e3, 200); }

DeltaSup delta_sup(const ScaleFunction& sf, double t, std::span<const double> theta_grid, const SolveConfig& cfg,
                   series::Exec exec) {
  require_t_ge_1(t, "delta_sup");
  if (theta_grid.size() < 200) throw DomainError("delta_sup: theta grid needs at least 200 points");
  if (!(theta_grid.front() <= 1e-3 * (1 + 1e-12) && theta_grid.back() >= 1e3 * (1 - 1e-12)))
    throw DomainError("delta_sup: theta grid must cover [1e-3, 1e3]");
  for (std::size_t i = 1; i < theta_grid.size(); ++i)
    if (!(theta_grid[i] > theta_grid[i - 1])) throw DomainError("delta_sup: theta grid must be increasing");

  const double nu = sf.nu();
  const double q = survival_q(sf, t, cfg);
  DeltaSup out;
  out.theta.assign(theta_grid.begin(), theta_grid.end());
  out.delta.assign(theta_grid.size(), 0.0);
  const auto n = static_cast<long>(theta_grid.size());
  auto cell = [&](long i) {
    const double th = theta_grid[i];
    out.delta[i] = std::abs(psi_given_q(sf, q, t, th, cfg) - psi_limit(nu, th));
  };
  if (exec == series::Exec::Parallel) {
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < n; ++i) {
      try {
        cell(i);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  } else {
    for (long i = 0; i < n; ++i) cell(i);
  }
  const auto it = std::max_element(out.delta.begin(), out.delta.end());
  const auto k = static_cast<std::size_t>(it - out.delta.begin());
  out.value = *it;
  out.argmax = out.theta[k];
  out.at_endpoint = (k == 0 || k + 1 == out.delta.size());
  return out;
}

// --- limit law ---------------------------------------------------------------

namespace {

using cld = std::complex<long double>;

// Laplace transform of D: Psi(p) / p.
cld cdf_transform(long double nu, cld p) {
  const cld one(1.0L, 0.0L);
  return std::pow(one + std::pow(p, nu), -(1.0L + 1.0L / nu)) / p;
}

long double cdf_transform(long double nu, long double p) {
  return std::pow(1.0L + std::pow(p, nu), -(1.0L + 1.0L / nu)) / p;
}

void check_nu(double nu) {
  if (!(nu > 0.0 && nu <= 1.0)) throw DomainError("d_limit: nu must lie in (0,1]");
}

}  // namespace

double d_limit_talbot(double nu, double x, int M) {
  check_nu(nu);
  if (!(x >= 0.0)) throw DomainError("d_limit: x must be >= 0");
  if (x == 0.0) return 0.0;
  const long double X = x, NU = nu;
  const long double r = 2.0L * M / (5.0L * X);
  long double sum = 0.5L * cdf_transform(NU, r) * std::exp(r * X);
  const long double pi = std::numbers::pi_v<long double>;
  for (int k = 1; k < M; ++k) {
    const long double th = k * pi / M;
    const long double cot = std::cos(th) / std::sin(th);
    const cld p(r * th * cot, r * th);
    const long double sigma = th + (th * cot - 1.0L) * cot;
    sum += std::real(std::exp(X * p) * cdf_transform(NU, p) * cld(1.0L, sigma));
  }
  return static_cast<double>(r / M * sum);
}

double d_limit_stehfest(double nu, double x, int N) {
  check_nu(nu);
  if (N % 2 != 0 || N < 2) throw DomainError("d_limit_stehfest: N must be even");
  if (!(x >= 0.0)) throw DomainError("d_limit: x must be >= 0");
  if (x == 0.0) return 0.0;
  const int half = N / 2;
  auto fact = [](int n) {
    long double f = 1.0L;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  const long double ln2 = std::numbers::ln2_v<long double>;
  const long double X = x;
  long double sum = 0.0L;
  for (int k = 1; k <= N; ++k) {
    long double V = 0.0L;
    for (int j = (k + 1) / 2; j <= std::min(k, half); ++j)
      V += std::pow(static_cast<long double>(j), half) * fact(2 * j) /
           (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k));
    if ((k + half) % 2 != 0) V = -V;
    sum += V * cdf_transform(static_cast<long double>(nu), k * ln2 / X);
  }
  return static_cast<double>(ln2 / X * sum);
}

bool DLimit::any_flagged() const { return std::find(flagged.begin(), flagged.end(), true) != flagged.end(); }

DLimit d_limit(double nu, std::span<const double> x_grid) {
  check_nu(nu);
  DLimit out;
  out.method = "fixed-talbot(M=24, long double); check: gaver-stehfest(N=18, long double)";
  for (double x : x_grid) {
    if (!(x > 0.0)) throw DomainError("d_limit: x grid must be positive");
    const double a = d_limit_talbot(nu, x);
    const double b = d_limit_stehfest(nu, x);
    out.x.push_back(x);
    out.D.push_back(a);
    out.D_check.push_back(b);
    out.flagged.push_back(!(std::abs(a - b) <= kInversionTolerance));
  }
  return out;
}

double d_limit_laplace_roundtrip(double nu, double theta) {
  check_nu(nu);
  if (!(theta > 0.0)) throw DomainError("d_limit_laplace_roundtrip: theta must be > 0");
  // theta int e^{-theta x} D(x) dx = int_0^inf e^{-u} D(u/theta) du
  auto g = [&](double u) { return std::exp(-u) * d_limit_talbot(nu, u / theta); };
  numeric::QuadOptions opt;
  opt.rel_tol = 1e-9;
  return numeric::integrate(g, 0.0, 1.0, opt) + numeric::integrate(g, 1.0, 60.0, opt);
}

// --- reports -------------------------------------------------------------------

void VerifyReport::add(const VerifyRecord& r) {
  if (!std::isfinite(r.t) || !std::isfinite(r.exact) || !std::isfinite(r.predicted) ||
      !std::isfinite(r.normalized_error) || !std::isfinite(r.residual))
    throw NumericalError("VerifyReport: non-finite record at t=" + std::to_string(r.t));
  const auto pos = std::upper_bound(records.begin(), records.end(), r.t,
                                    [](double t, const VerifyRecord& x) { return t < x.t; });
  records.insert(pos, r);
}

VerifyReport baseline_checks(const ScaleFunction& sf, std::span<const double> t_grid, double s,
                             const SolveConfig& cfg) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("baseline_checks: s must lie in [0,1)");
  VerifyReport rep;
  const double y = 1.0 - s;
  if (sf.family() == Family::BinarySplitBaseline) {
    rep.equation = tags::kFiniteVariance;
    rep.method = "ode";
    for (double t : t_grid) {
      const double R = solve_R_c(sf, y, t, cfg);
      const double lhs = 1.0 / R - 1.0 / y;
      const double rhs = sf.a0() * t;
      const double res = (lhs - rhs) * R;
      rep.add({t, lhs, rhs, res, res});
    }
  } else {
    rep.equation = tags::kRegularVariation;
    rep.method = "oracle";
    for (double t : t_grid) {
      if (!(t > 0.0)) throw DomainError("baseline_checks: t must be > 0");
      const double q = survival_R_c(sf, y, t, cfg);
      const double lhs = q / sf.f_complement(q);
      const double rhs = sf.nu() * t;
      rep.add({t, lhs, rhs, lhs / rhs, lhs / rhs - 1.0});
    }
  }
  return rep;
}

RateFit fit_rate(std::span<const double> t, std::span<const double> residual, RateAxis axis) {
  if (t.size() != residual.size()) throw DomainError("fit_rate: size mismatch");
  if (t.size() < 5) throw DomainError("fit_rate: need at least 5 records");
  const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1 - 1e-12))
    throw DomainError("fit_rate: records must span at least two decades of t");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(std::abs(residual[i]) > 0.0) || !std::isfinite(residual[i]))
      throw DomainError("fit_rate: residuals must be finite and non-zero");
    if (axis == RateAxis::LogTOverT) {
      if (!(t[i] > 1.0)) throw DomainError("fit_rate: ln t / t axis needs t > 1");
      x.push_back(std::log(std::log(t[i]) / t[i]));
    } else {
      x.push_back(std::log(t[i]));
    }
    y.push_back(std::log(std::abs(residual[i])));
  }
  const auto lf = numeric::least_squares(x, y);
  RateFit f;
  f.slope = lf.slope;
  f.intercept = lf.intercept;
  f.r2 = lf.r2;
  // residual ~ C ln t / t, or C / t on the log t axis
  const double pinned = axis == RateAxis::LogTOverT ? 1.0 : -1.0;
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m += y[i] - pinned * x[i];
  f.unit_slope_constant = std::exp(m / static_cast<double>(x.size()));
  f.accepted = f.r2 >= kRateFitMinR2;
  return f;
}

RateFit fit_rate(const VerifyReport& report, RateAxis axis) {
  std::vector<double> t, r;
  for (const auto& rec : report.records) {
    t.push_back(rec.t);
    r.push_back(rec.residual);
  }
  return fit_rate(t, r, axis);
}

}  // namespace critlab
