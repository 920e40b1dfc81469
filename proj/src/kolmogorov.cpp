#include "critlab/kolmogorov.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <sstream>

#include "critlab/error.hpp"
#include "critlab/numeric.hpp"

namespace odeint = boost::numeric::odeint;

namespace critlab {

void SolveConfig::validate() const {
  auto in_range = [](double v) { return v >= 1e-14 && v <= 1e-3; };
  if (!in_range(rel_tol) || !in_range(abs_tol)) {
    std::ostringstream msg;
    msg << "SolveConfig: tolerances must lie in [1e-14, 1e-3] (rel_tol=" << rel_tol
        << ", abs_tol=" << abs_tol << ")";
    throw DomainError(msg.str());
  }
  if (max_step < 0.0) throw DomainError("SolveConfig: max_step must be >= 0");
  if (method != "dopri5") throw DomainError("SolveConfig: unsupported method '" + method + "'");
}

namespace {

void check_y(double y, const char* who) {
  if (!(y > 0.0 && y <= 1.0)) throw DomainError(std::string(who) + ": s must lie in [0,1)");
}

void check_t(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError(std::string(who) + ": t must be >= 0");
}

template <class State, class System>
void integrate(System&& sys, State& x, double t, const SolveConfig& cfg) {
  cfg.validate();
  using Stepper = odeint::runge_kutta_dopri5<State>;
  const double dt0 = std::min(1e-3, t);
  try {
    if (cfg.max_step > 0.0) {
      auto stepper = odeint::make_controlled(cfg.abs_tol, cfg.rel_tol, cfg.max_step, Stepper());
      odeint::integrate_adaptive(stepper, sys, x, 0.0, t, dt0);
    } else {
      auto stepper = odeint::make_controlled(cfg.abs_tol, cfg.rel_tol, Stepper());
      odeint::integrate_adaptive(stepper, sys, x, 0.0, t, dt0);
    }
  } catch (const std::exception& e) {
    throw NumericalError(std::string("ODE integration failed (step-size underflow?): ") + e.what());
  }
  for (double v : x)
    if (!std::isfinite(v)) throw NumericalError("ODE integration produced a non-finite state");
}

// State (ln R, int_0^t delta(R) du).
std::array<double, 2> integrate_log_R(const ScaleFunction& sf, double y, double t, const SolveConfig& cfg) {
  std::array<double, 2> x{std::log(y), 0.0};
  if (t == 0.0) return x;
  auto sys = [&sf](const std::array<double, 2>& u, std::array<double, 2>& du, double) {
    const double R = std::exp(u[0]);
    du[0] = -sf.Lambda(R);
    du[1] = sf.delta(R);
  };
  integrate(sys, x, t, cfg);
  return x;
}

// Increment w - w0 of w = 1/Lambda(R) for DeltaEqualsLambda:
// (w - w0)/nu - ln(1 + nu (w - w0)/(nu w0 + 1))/nu^2 = t.
double deltaL_w_increment(double nu, double w0, double t) {
  if (t == 0.0) return 0.0;
  const double c = nu * w0 + 1.0;
  auto h = [&](double d) { return d / nu - std::log1p(nu * d / c) / (nu * nu) - t; };
  double hi = nu * t + 1.0 + 2.0 / nu * std::log1p(nu * nu * t + nu * t);
  const auto br = numeric::expand_upward(h, 0.0, hi, 2.0, 200);
  double d = numeric::find_root(h, br.lo, br.hi, {.rel_tol = 1e-15, .abs_tol = 0.0, .max_iter = 400}).root;
  // Newton polish: h'(d) = w / (nu w + 1) / ... with w = w0 + d.
  for (int i = 0; i < 2; ++i) {
    const double w = w0 + d;
    const double dh = w / (nu * w + 1.0);
    const double step = h(d) / dh;
    if (!std::isfinite(step)) break;
    d -= step;
  }
  return d;
}

}  // namespace

double solve_R_c(const ScaleFunction& sf, double y, double t, const SolveConfig& cfg) {
  check_y(y, "solve_F");
  check_t(t, "solve_F");
  if (t == 0.0) return y;
  return std::exp(integrate_log_R(sf, y, t, cfg)[0]);
}

Rts solve_F(const ScaleFunction& sf, double s, double t, const SolveConfig& cfg) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("solve_F: s must lie in [0,1)");
  return {t, s, solve_R_c(sf, 1.0 - s, t, cfg)};
}

double exact_R_deltaL_c(const ModelParams& params, double y, double t) {
  if (params.family != Family::DeltaEqualsLambda)
    throw DomainError("exact_R_deltaL: requires the DeltaEqualsLambda family");
  check_y(y, "exact_R_deltaL");
  check_t(t, "exact_R_deltaL");
  if (t == 0.0) return y;
  const auto sf = make_scale_function(params);
  const double nu = params.nu, a0 = params.a0;
  const double w0 = 1.0 / sf.Lambda(y);
  const double d = deltaL_w_increment(nu, w0, t);
  // Lambda = 1/w inverts as y^nu = (nu + a0) / (a0 (nu w + 1)).
  const double nw1 = nu * (w0 + d) + 1.0;
  return std::pow((nu + a0) / (a0 * nw1), 1.0 / nu);
}

Rts exact_R_deltaL(const ModelParams& params, double s, double t) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("exact_R_deltaL: s must lie in [0,1)");
  return {t, s, exact_R_deltaL_c(params, 1.0 - s, t)};
}

std::optional<double> exact_R_c(const ScaleFunction& sf, double y, double t) {
  check_y(y, "exact_R");
  check_t(t, "exact_R");
  const double a0 = sf.a0();
  switch (sf.family()) {
    case Family::ConstantL: {
      // R^{-nu} = y^{-nu} + nu a0 t
      const double nu = sf.nu();
      return std::pow(std::pow(y, -nu) + nu * a0 * t, -1.0 / nu);
    }
    case Family::BinarySplitBaseline: return 1.0 / (1.0 / y + a0 * t);
    case Family::DeltaEqualsLambda: return exact_R_deltaL_c(sf.params(), y, t);
  }
  return std::nullopt;
}

double survival_R_c(const ScaleFunction& sf, double y, double t, const SolveConfig& cfg) {
  if (t > kOracleHorizon) {
    if (auto r = exact_R_c(sf, y, t)) return *r;
  }
  return solve_R_c(sf, y, t, cfg);
}

double mho_c(const ScaleFunction& sf, double y, double t, const SolveConfig& cfg) {
  check_y(y, "mho");
  check_t(t, "mho");
  if (t == 0.0) return 0.0;
  if (sf.family() == Family::ConstantL || sf.family() == Family::BinarySplitBaseline) return 0.0;
  if (t > kOracleHorizon && sf.family() == Family::DeltaEqualsLambda) {
    const double nu = sf.nu();
    const double w0 = 1.0 / sf.Lambda(y);
    const double d = deltaL_w_increment(nu, w0, t);
    return std::log1p(nu * d / (nu * w0 + 1.0)) / nu;  // = d - nu t
  }
  return integrate_log_R(sf, y, t, cfg)[1];
}

double mho(const ScaleFunction& sf, double s, double t, const SolveConfig& cfg) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("mho: s must lie in [0,1)");
  return mho_c(sf, 1.0 - s, t, cfg);
}

double identity_lemma2_residual(const ScaleFunction& sf, double s, double t, const SolveConfig& cfg) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("identity_lemma2_residual: s must lie in [0,1)");
  check_t(t, "identity_lemma2_residual");
  const double y = 1.0 - s;
  const auto x = integrate_log_R(sf, y, t, cfg);
  const double R = std::exp(x[0]);
  const double lhs = 1.0 / sf.Lambda(R) - 1.0 / sf.Lambda(y);
  return lhs - (sf.nu() * t + x[1]);
}

double G_of_c(const ScaleFunction& sf, double s, double y, double t, const SolveConfig& cfg) {
  check_y(y, "G_of");
  if (!(s > 0.0)) throw DomainError("G_of: s must lie in (0,1)");
  if (t == 0.0) return s;
  const double R = survival_R_c(sf, y, t, cfg);
  return s * (R / y) * (sf.Lambda(R) / sf.Lambda(y));
}

double G_of(const ScaleFunction& sf, double s, double t, const SolveConfig& cfg) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("G_of: s must lie in (0,1)");
  return G_of_c(sf, s, 1.0 - s, t, cfg);
}

SeriesState evolve_series(const ScaleFunction& sf, std::size_t J, double t, const SolveConfig& cfg,
                          series::Exec exec) {
  if (J < 2) throw DomainError("evolve_series: J must be >= 2");
  check_t(t, "evolve_series");
  SeriesState st;
  st.t = t;
  st.coeffs.assign(J + 1, 0.0);
  st.coeffs[1] = 1.0;
  if (t > 0.0) {
    std::vector<double> g(J + 1), lam(J + 1);
    auto sys = [&](const std::vector<double>& F, std::vector<double>& dF, double) {
      // f(F) = f(1 - g) = g Lambda(g) with g = 1 - F.
      for (std::size_t j = 0; j <= J; ++j) g[j] = -F[j];
      g[0] += 1.0;
      sf.model().Lambda_series(g, lam);
      series::multiply(g, lam, dF, exec);
    };
    integrate(sys, st.coeffs, t, cfg);
  }
  double mass = 0.0;
  for (double c : st.coeffs) mass += c;
  st.mass_defect = 1.0 - mass;
  if (st.mass_defect > cfg.mass_defect_max) {
    std::ostringstream msg;
    msg << "evolve_series: mass beyond J=" << J << " is " << st.mass_defect
        << " (limit " << cfg.mass_defect_max << "); increase J";
    throw NumericalError(msg.str());
  }
  return st;
}

std::vector<std::vector<double>> transition_matrix(const SeriesState& st, std::size_t imax,
                                                   std::size_t jmax, series::Exec exec) {
  if (jmax > st.order()) throw DomainError("transition_matrix: jmax exceeds series order");
  return series::powers(st.coeffs, imax, jmax, exec);
}

std::vector<double> transition_row(const SeriesState& st, unsigned i, std::size_t jmax) {
  if (jmax > st.order()) throw DomainError("transition_row: jmax exceeds series order");
  return series::integer_power(st.coeffs, i, jmax);
}

QMatrix q_matrix(const SeriesState& st, std::size_t imax, std::size_t jmax, series::Exec exec) {
  QMatrix out;
  out.q = transition_matrix(st, imax, jmax, exec);
  const auto& F = st.coeffs;

  // Tails of Z(t) and of its size-biased law at level m.
  auto tail_F = [&](std::size_t m) {
    double s = 0.0;
    for (std::size_t j = 0; j <= m; ++j) s += F[j];
    return std::max(0.0, 1.0 - s);
  };
  auto tail_G = [&](std::size_t m) {
    double s = 0.0;
    for (std::size_t j = 1; j <= m; ++j) s += static_cast<double>(j) * F[j];
    return std::max(0.0, 1.0 - s);
  };

  for (std::size_t i = 1; i <= imax; ++i) {
    auto& row = out.q[i - 1];
    double sum = 0.0;
    for (std::size_t j = 0; j <= jmax; ++j) {
      row[j] *= static_cast<double>(j) / static_cast<double>(i);
      sum += row[j];
    }
    out.row_defect.push_back(1.0 - sum);
    // W = X_1 + ... + X_{i-1} + Y with X ~ Z(t), Y size-biased; W > jmax
    // forces some summand above jmax / i.
    const std::size_t m = jmax / i;
    out.defect_bound.push_back(static_cast<double>(i - 1) * tail_F(m) + tail_G(m));
  }
  return out;
}

QMatrix q_matrix(const ScaleFunction& sf, std::size_t J, double t, const SolveConfig& cfg) {
  const auto st = evolve_series(sf, J, t, cfg);
  return q_matrix(st, J, J);
}

std::vector<double> mbp_invariant_coeffs(const ScaleFunction& sf, std::size_t J) {
  const auto a = expand_coeffs(sf, std::max<std::size_t>(J, 2)).coeffs;
  std::vector<double> inv(J + 1);
  series::reciprocal(a, inv);
  std::vector<double> mu(J + 1, 0.0);
  for (std::size_t j = 1; j <= J; ++j) mu[j] = inv[j - 1] / static_cast<double>(j);
  return mu;
}

double nu_ts(const ScaleFunction& sf, double s, double t) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("nu_ts: s must lie in [0,1)");
  return sf.Lambda(1.0 - s) * sf.nu() * t + 1.0;
}

}  // namespace critlab
