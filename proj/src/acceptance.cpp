#include "critlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "critlab/asymptotics.hpp"
#include "critlab/branching_model.hpp"
#include "critlab/catalog.hpp"
#include "critlab/error.hpp"
#include "critlab/kolmogorov.hpp"
#include "critlab/simulator.hpp"

namespace critlab::acceptance {

namespace {

using harness::ReportRow;
using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ScaleFunction model(Family f, double nu, double a0) { return make_scale_function({nu, a0, f}); }
ScaleFunction constant_l(double a0 = 1.0) { return model(Family::ConstantL, 0.5, a0); }
ScaleFunction delta_l(double a0 = 1.0) { return model(Family::DeltaEqualsLambda, 0.5, a0); }

double option(const Options& o, const std::string& key, double fallback) {
  const auto it = o.overrides.find(key);
  return it == o.overrides.end() ? fallback : it->second;
}

// 10^a, 10^(a+1), ..., up to hi
std::vector<double> decades(double lo, double hi) {
  std::vector<double> out;
  for (double t = lo; t <= hi * (1 + 1e-9); t *= 10.0) out.push_back(t);
  if (out.empty() || out.back() < hi * (1 - 1e-9)) out.push_back(hi);
  return out;
}

std::string name(const ScaleFunction& sf) {
  return fmt("%s(nu=%g,a0=%g)", std::string(to_string(sf.family())).c_str(), sf.nu(), sf.a0());
}

const char* provenance(double t) { return t > kOracleHorizon ? "oracle" : "ode"; }

void log(const Options& o, const std::string& line) {
  if (o.log) *o.log << "    .. " << line << std::endl;
}

// ---------------------------------------------------------------------------

void c1_closed_form(const Options&, Outcome& out) {
  const auto sf = constant_l();
  double worst = 0.0;
  for (double t : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
    const double ode = solve_R_c(sf, 1.0, t);
    const double exact = std::pow(1.0 + t / 2.0, -2.0);
    const double rel = std::abs(ode - exact) / exact;
    worst = std::max(worst, rel);
    out.rows.push_back({"C1:" + name(sf), std::string(tags::kBackward), t, exact, ode, rel, "oracle", {}});
  }
  out.passed = worst <= 1e-8;
  out.summary = fmt("max |q_ode - (1+t/2)^-2| / q = %.3g (tol 1e-8)", worst);
}

void c2_identity(const Options&, Outcome& out) {
  double worst = 0.0;
  for (const auto& sf : {constant_l(), delta_l()}) {
    for (double s : {0.0, 0.5, 0.9}) {
      for (double t : {1.0, 10.0, 100.0, 1000.0}) {
        const double r = identity_lemma2_residual(sf, s, t);
        worst = std::max(worst, std::abs(r));
        out.rows.push_back({fmt("C2:%s:s=%g", name(sf).c_str(), s), std::string(tags::kIdentity), t, 0.0, r, r,
                            "ode", {}});
      }
    }
  }
  out.passed = worst <= 1e-6;
  out.summary = fmt("max |residual| = %.3g over 2 families x 3 s x 4 t (tol 1e-6)", worst);
}

void c3_semigroup(const Options&, Outcome& out) {
  const double grid[] = {0.1, 0.5, 1.0, 5.0, 10.0};
  double worst = 0.0;
  for (const auto& sf : {constant_l(), delta_l()}) {
    for (double s : {0.0, 0.5, 0.9}) {
      for (double t : grid) {
        const double mid = solve_R_c(sf, 1.0 - s, t);
        for (double tau : grid) {
          const double direct = solve_R_c(sf, 1.0 - s, t + tau);
          const double composed = solve_R_c(sf, mid, tau);
          const double d = std::abs(direct - composed);
          worst = std::max(worst, d);
          out.rows.push_back({fmt("C3:%s:s=%g:tau=%g", name(sf).c_str(), s, tau), std::string(tags::kSemigroup), t,
                              direct, composed, d, "ode", {}});
        }
      }
    }
  }
  out.passed = worst <= 1e-8;
  out.summary = fmt("max |F(t+tau;s) - F(tau;F(t;s))| = %.3g on 5x5x3 grid, 2 families (tol 1e-8)", worst);
}

// E(t) over 1e4..t_eval; band check at t_eval, optional monotone trend.
struct Trend {
  std::vector<double> t, E;
  bool monotone() const {
    for (std::size_t i = 1; i < E.size(); ++i)
      if (!(std::abs(E[i] - 1.0) < std::abs(E[i - 1] - 1.0))) return false;
    return true;
  }
};

void c4_survival(const Options& o, Outcome& out) {
  const auto sf = delta_l();
  const double t_eval = option(o, "t_eval.1.14", 1e8);
  const double band = option(o, "band.1.14", 0.1);
  Trend tr;
  for (double t : decades(std::min(1e4, t_eval), t_eval)) {
    const double q = *exact_R_c(sf, 1.0, t);
    const auto p = predict_q(sf, t, CorrectionForm::Log);
    const double E = p.normalized_error(q);
    tr.t.push_back(t);
    tr.E.push_back(E);
    out.rows.push_back({"C4:" + name(sf), p.formula, t, q, p.value(), E, "oracle", {}});
  }
  const double last = tr.E.back();
  const bool in_band = std::abs(last - 1.0) <= band;
  out.passed = in_band && tr.monotone();
  std::string series;
  for (std::size_t i = 0; i < tr.t.size(); ++i) series += fmt(" %.0e:%.4f", tr.t[i], tr.E[i]);
  out.summary = fmt("E(%.0e) = %.4f, band [%g, %g]%s; |E-1| %s;", t_eval, last, 1 - band, 1 + band,
                    in_band ? "" : " MISSED", tr.monotone() ? "decreasing" : "NOT decreasing") + series;
}

void c5_p11(const Options& o, Outcome& out) {
  const auto sf = delta_l();
  const double t_eval = option(o, "t_eval.1.16", 1e8);
  const double band = option(o, "band.1.16", 0.15);
  Trend tr;
  for (double t : decades(std::min(1e4, t_eval), t_eval)) {
    const double q = *exact_R_c(sf, 1.0, t);
    const double scaled = q * sf.Lambda(q) / sf.a0() * p11_scale(sf, t);
    const auto p = predict_p11(sf, t, CorrectionForm::Log);
    const double E = p.normalized_error(scaled);
    tr.t.push_back(t);
    tr.E.push_back(E);
    out.rows.push_back({"C5:" + name(sf), p.formula, t, scaled, p.value(), E, "oracle", {}});
  }
  const double last = tr.E.back();
  out.passed = std::abs(last - 1.0) <= band;
  std::string series;
  for (std::size_t i = 0; i < tr.t.size(); ++i) series += fmt(" %.0e:%.4f", tr.t[i], tr.E[i]);
  out.summary = fmt("E(%.0e) = %.4f relative to (1+nu)/nu^3, band [%g, %g];", t_eval, last, 1 - band, 1 + band) +
                series;
  out.notes.push_back(fmt("trend of |E-1| over 1e4..%.0e: %s", t_eval, tr.monotone() ? "decreasing" : "not monotone"));
}

void c6_G(const Options& o, Outcome& out) {
  const auto sf = delta_l();
  const double t = option(o, "t_eval.1.22", 1e6);
  const double band = option(o, "band.1.22", 0.2);
  bool ok = true;
  std::string detail;
  for (double s : {0.25, 0.5, 0.75}) {
    const double G = G_of(sf, s, t) * p11_scale(sf, t);
    const auto p = predict_G(sf, s, t);
    const double ratio = G / p.leading;
    const double E = p.normalized_error(G);
    ok = ok && std::abs(ratio - 1.0) <= 0.02 && std::abs(E - 1.0) <= band;
    detail += fmt(" s=%g: ratio %.5f, E %.3f;", s, ratio, E);
    const auto exp = fmt("C6:%s:s=%g", name(sf).c_str(), s);
    out.rows.push_back({exp, std::string(tags::kGLeading), t, G, p.leading, ratio, provenance(t), {}});
    out.rows.push_back({exp, p.formula, t, G, p.value(), E, provenance(t), {}});
  }
  out.passed = ok;
  out.summary = fmt("t=%.0e, ratio within 2%%, second-order E within [%g, %g]:", t, 1 - band, 1 + band) + detail;
}

void c7_laplace(const Options& o, Outcome& out) {
  const auto sf = delta_l();
  const double nu = sf.nu();
  const double t_eval = option(o, "t_eval.1.23", 1e6);
  const double band = option(o, "band.1.23", 0.2);
  const auto grid = default_theta_grid();
  std::vector<double> ts = decades(1e3, 1e7), sup, norm;
  if (std::find(ts.begin(), ts.end(), t_eval) == ts.end()) {
    ts.push_back(t_eval);
    std::sort(ts.begin(), ts.end());
  }
  double at_eval = 0.0;
  bool endpoint = false;
  for (double t : ts) {
    const auto d = delta_sup(sf, t, grid, {}, o.exec);
    const double scale = (1.0 + nu) / (nu * nu * nu) * std::log(t) / t;
    sup.push_back(d.value);
    norm.push_back(d.value / scale);
    endpoint = endpoint || d.at_endpoint;
    if (t == t_eval) at_eval = d.value / scale;
    out.rows.push_back({"C7:" + name(sf), std::string(tags::kLaplaceSup), t, d.value, scale, d.value / scale,
                        provenance(t), {}});
    out.notes.push_back(fmt("t=%.0e sup %.4g at theta=%.3g, normalized %.4f%s", t, d.value, d.argmax,
                            d.value / scale, d.at_endpoint ? " (grid endpoint)" : ""));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < sup.size(); ++i) decreasing = decreasing && sup[i] < sup[i - 1];
  const bool in_band = std::abs(at_eval - 1.0) <= band;
  out.passed = in_band && decreasing;
  out.summary = fmt("normalized sup at t=%.0e = %.4f, band [%g, %g]%s; sup %s over 1e3..1e7", t_eval, at_eval,
                    1 - band, 1 + band, in_band ? "" : " MISSED", decreasing ? "decreasing" : "NOT decreasing");
  // sup_c c/(1+c)^{2+1/nu} at c = nu/(1+nu)
  const double c = nu / (1.0 + nu);
  const double K = c / std::pow(1.0 + c, 2.0 + 1.0 / nu);
  out.notes.push_back(fmt("supplementary: normalized sup / sup_c c(1+c)^-(2+1/nu) = %.4f / %.5f = %.4f "
                          "(theta-dependent prefactor retained)",
                          at_eval, K, at_eval / K));
  if (endpoint) out.notes.push_back("warning: a sup sat on a theta-grid endpoint");
}

void c8_invariant(const Options& o, Outcome& out) {
  constexpr std::size_t J = 1024, jmax = 50, imax = 1024;
  double worst_mu = 0.0, worst_pi = 0.0;
  for (const auto& sf : {constant_l(), delta_l(0.1)}) {
    const auto st = evolve_series(sf, J, 1.0, {}, o.exec);
    const auto mu = mbp_invariant_coeffs(sf, J);
    const auto P = transition_matrix(st, imax, jmax, o.exec);
    const auto pi = pi_coeffs(sf, J);
    const auto Q = q_matrix(st, imax, jmax, o.exec);
    double em = 0.0, ep = 0.0, sum_m = 0.0, sum_p = 0.0;
    std::size_t jm = 1, jp = 1;
    for (std::size_t j = 1; j <= jmax; ++j) {
      double sm = 0.0, sp = 0.0;
      for (std::size_t i = 1; i <= imax; ++i) {
        sm += mu[i] * P[i - 1][j];
        sp += pi.coeffs[i] * Q.q[i - 1][j];
      }
      if (std::abs(sm - mu[j]) > em) em = std::abs(sm - mu[j]), jm = j, sum_m = sm;
      if (std::abs(sp - pi.coeffs[j]) > ep) ep = std::abs(sp - pi.coeffs[j]), jp = j, sum_p = sp;
    }
    worst_mu = std::max(worst_mu, em);
    worst_pi = std::max(worst_pi, ep);
    out.rows.push_back({fmt("C8:%s:mu:j=%zu", name(sf).c_str(), jm), std::string(tags::kInvariant), 1.0, mu[jm],
                        sum_m, em, "ode", {}});
    out.rows.push_back({fmt("C8:%s:pi:j=%zu", name(sf).c_str(), jp), std::string(tags::kPi), 1.0, pi.coeffs[jp],
                        sum_p, ep, "ode", {}});
    out.notes.push_back(fmt("%s: mu residual %.3g (j=%zu), pi residual %.3g (j=%zu), series mass defect %.3g",
                            name(sf).c_str(), em, jm, ep, jp, st.mass_defect));
  }
  out.passed = worst_mu <= 1e-6 && worst_pi <= 1e-6;
  out.summary = fmt("max_j<=50 |sum mu_i P_ij(1) - mu_j| = %.3g, |sum pi_i Q_ij(1) - pi_j| = %.3g (tol 1e-6, J=1024)",
                    worst_mu, worst_pi);
}

void c9_tauberian(const Options&, Outcome& out) {
  constexpr std::size_t n = 10000;
  bool ok = true;
  std::string detail;
  for (const auto& sf : {constant_l(), delta_l(0.1)}) {
    const auto pi = pi_coeffs(sf, n);
    const double r = tauberian_ratio(sf, pi, n);
    ok = ok && std::abs(r - 1.0) <= 0.05;
    detail += fmt(" %s: %.6f;", name(sf).c_str(), r);
    out.rows.push_back({"C9:" + name(sf), std::string(tags::kTauberian), static_cast<double>(n),
                        pi.partial_sums[n], {}, r, "ode", {}});
  }
  out.passed = ok;
  out.summary = "ratio at n=1e4 within [0.95, 1.05]:" + detail;
}

void c10_monte_carlo(const Options& o, Outcome& out) {
  const auto sf = constant_l();
  const OffspringDistribution dist(sf);
  MCConfig mc;
  mc.n = 100000;
  mc.seed = o.seed;
  mc.exec = o.exec;
  const double t2[] = {2.0};
  const auto run = run_grid(ProcessKind::Branching, dist, t2, mc);
  const auto est = survival_estimates(run)[0];
  const double z = (est.value - 0.25) / est.std_error;
  bool ok = std::abs(z) <= 3.0;
  out.rows.push_back({"C10:" + name(sf) + ":survival", std::string(tags::kMonteCarlo), 2.0, est.value, 0.25, z, "mc",
                      est.std_error});
  std::string detail = fmt("q_hat(2) = %.5f +- %.5f vs 0.25 (z=%.2f);", est.value, est.std_error, z);

  // Q-process: exact engine Q_1j(1) = j F_j(1)
  constexpr std::size_t jmax = 10;
  const auto st = evolve_series(sf, 1024, 1.0, {}, o.exec);
  MCConfig qc = mc;
  qc.seed = o.seed + 1;
  qc.sim.population_cap = 1'000'000;
  const double t1[] = {1.0};
  const auto qrun = run_grid(ProcessKind::QProcess, dist, t1, qc);
  const auto cells = cell_estimates(qrun, 0, jmax);
  double worst = 0.0;
  for (std::size_t j = 1; j <= jmax; ++j) {
    const double p = static_cast<double>(j) * st.coeffs[j];
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(qc.n));
    const double zj = (cells[j].value - p) / sigma;
    worst = std::max(worst, std::abs(zj));
    out.rows.push_back({fmt("C10:%s:P(W=%zu)", name(sf).c_str(), j), std::string(tags::kMonteCarlo), 1.0,
                        cells[j].value, p, zj, "mc", cells[j].std_error});
  }
  ok = ok && worst <= 4.0;
  detail += fmt(" Q-process cells j<=10 at t=1: max |z| = %.2f (4 sigma), %zu of %zu paths above cap 1e6", worst,
                qrun.censored, qrun.n());
  out.passed = ok;
  out.summary = detail;
}

// KS distances of q(t)W(t) against the limit law on one run.
struct KsRow {
  double t, q, ks, dkw;
  std::size_t censored;
};

std::vector<KsRow> ks_rows(const GridRun& run, const ScaleFunction& sf) {
  std::vector<KsRow> out;
  const double nu = sf.nu();
  for (std::size_t g = 0; g < run.grid.size(); ++g) {
    const double t = run.grid[g];
    const double q = survival_q(sf, t);
    const auto emp = empirical_D(run, g, q);
    const double ks = ks_distance(emp, [nu](double x) { return d_limit_talbot(nu, x); });
    std::size_t cens = 0;
    for (auto v : run.sizes[g]) cens += v == kAboveCap;
    out.push_back({t, q, ks, emp.dkw_band(), cens});
  }
  return out;
}

void c11_ks(const Options& o, Outcome& out) {
  const auto start = Clock::now();
  constexpr double kBudget = 600.0;
  constexpr std::size_t kN = 1'000'000;
  const auto sf = delta_l(0.1);
  const OffspringDistribution dist(sf);
  const std::vector<double> grid{10.0, 100.0, 1000.0};

  // throughput at t = 10
  MCConfig cal;
  cal.n = 2000;
  cal.seed = o.seed;
  cal.exec = o.exec;
  auto t0 = Clock::now();
  const std::vector<double> g10{10.0};
  const auto calrun = run_grid(ProcessKind::QProcess, dist, g10, cal);
  const double cal_s = std::max(seconds_since(t0), 1e-6);
  const double events_per_s = static_cast<double>(calrun.events) / cal_s;
  log(o, fmt("calibration: %zu paths to t=10, %.0f events/path, %.3g events/s", cal.n,
             static_cast<double>(calrun.events) / cal.n, events_per_s));

  // pilot on the full grid under a 30 s event budget
  constexpr double kPilotSeconds = 30.0;
  MCConfig pilot = cal;
  pilot.n = 1000;
  pilot.seed = o.seed + 1;
  pilot.max_events = static_cast<std::uint64_t>(events_per_s * kPilotSeconds);
  double projected = 0.0;
  bool pilot_done = false;
  t0 = Clock::now();
  try {
    const auto prun = run_grid(ProcessKind::QProcess, dist, grid, pilot);
    projected = seconds_since(t0) * static_cast<double>(kN) / static_cast<double>(pilot.n);
    pilot_done = true;
    log(o, fmt("pilot: %zu paths in %.1f s, %.3g events/path", pilot.n, seconds_since(t0),
               static_cast<double>(prun.events) / pilot.n));
  } catch (const BudgetExceeded& e) {
    const double per_path = seconds_since(t0) / static_cast<double>(std::max<std::size_t>(e.paths_done(), 1));
    projected = per_path * static_cast<double>(kN);
    log(o, fmt("pilot: event budget %.3g spent after %zu of %zu paths", static_cast<double>(pilot.max_events),
               e.paths_done(), pilot.n));
  }
  const double remaining = kBudget - seconds_since(start);
  out.notes.push_back(fmt("projected runtime for n=1e6 on {10, 100, 1000}: %s%.3g s (%s pilot); budget left %.0f s",
                          pilot_done ? "" : ">= ", projected, pilot_done ? "complete" : "truncated", remaining));

  // informational sweep at reachable scale
  {
    MCConfig sup = cal;
    sup.n = 5000;
    sup.seed = o.seed + 2;
    sup.sim.population_cap = 1'000'000;
    sup.max_events = static_cast<std::uint64_t>(events_per_s * 60.0);
    const std::vector<double> sgrid{10.0, std::sqrt(1000.0), 100.0};
    try {
      const auto srun = run_grid(ProcessKind::QProcess, dist, sgrid, sup);
      for (const auto& r : ks_rows(srun, sf)) {
        out.notes.push_back(fmt("supplementary n=%zu cap 1e6: t=%.4g q=%.4g KS=%.4f DKW=%.4f censored=%zu", sup.n,
                                r.t, r.q, r.ks, r.dkw, r.censored));
        out.rows.push_back({"C11:supplementary", std::string(tags::kKolmogorovSmirnov), r.t, r.ks, r.dkw, {}, "mc",
                            {}});
      }
    } catch (const BudgetExceeded& e) {
      out.notes.push_back(fmt("supplementary sweep stopped by its event budget after %zu paths", e.paths_done()));
    }
  }

  if (o.enforce_budget && projected > kBudget - seconds_since(start)) {
    out.passed = false;
    out.summary = fmt("not reachable: n=1e6 Q-process paths to t=1000 projected at %s%.3g s against a %.0f s budget",
                      pilot_done ? "" : ">= ", projected, kBudget);
    return;
  }

  MCConfig full = cal;
  full.n = kN;
  full.seed = o.seed + 3;
  const auto run = run_grid(ProcessKind::QProcess, dist, grid, full);
  const auto rows = ks_rows(run, sf);
  // KS - DKW = C ln t / t, least squares through the origin
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (const auto& r : rows) {
    const double x = std::log(r.t) / r.t, y = r.ks - r.dkw;
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  const double C = sxy / sxx;
  double sse = 0.0;
  for (const auto& r : rows) {
    const double x = std::log(r.t) / r.t, y = r.ks - r.dkw;
    sse += (y - C * x) * (y - C * x);
  }
  const double r2 = syy > 0.0 ? 1.0 - sse / syy : 0.0;
  bool decreasing = true, bounded = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) decreasing = decreasing && rows[i].ks < rows[i - 1].ks;
    bounded = bounded && rows[i].ks <= 2.0 * rows[i].dkw + C * std::log(rows[i].t) / rows[i].t;
    out.rows.push_back({"C11:" + name(sf), std::string(tags::kKolmogorovSmirnov), rows[i].t, rows[i].ks,
                        rows[i].dkw + C * std::log(rows[i].t) / rows[i].t, {}, "mc", {}});
  }
  out.passed = decreasing && bounded && r2 >= 0.9;
  out.summary = fmt("KS %.4f / %.4f / %.4f, %s; fitted C=%.4g, R^2=%.3f; %s", rows[0].ks, rows[1].ks, rows[2].ks,
                    decreasing ? "decreasing" : "NOT decreasing", C, r2, bounded ? "bounded" : "NOT bounded");
}

void c12_baselines(const Options&, Outcome& out) {
  const auto bs = model(Family::BinarySplitBaseline, 1.0, 1.0);
  const std::vector<double> ts{0.1, 1.0, 10.0, 100.0, 1000.0};
  double worst = 0.0;
  for (double s : {0.0, 0.5}) {
    const auto rep = baseline_checks(bs, ts, s);
    for (const auto& r : rep.records) {
      worst = std::max(worst, std::abs(r.residual));
      out.rows.push_back({fmt("C12:%s:s=%g", name(bs).c_str(), s), rep.equation, r.t, r.exact, r.predicted,
                          r.residual, rep.method, {}});
    }
  }
  bool ok = worst <= 1e-9;
  std::string detail = fmt("BinarySplit max |residual| = %.3g (tol 1e-9);", worst);
  const std::vector<double> big{1e6};
  for (const auto& sf : {constant_l(), delta_l()}) {
    const auto rep = baseline_checks(sf, big, 0.0);
    const double ratio = rep.records[0].normalized_error;
    ok = ok && std::abs(ratio - 1.0) <= 0.01;
    detail += fmt(" %s ratio %.5f;", name(sf).c_str(), ratio);
    out.rows.push_back({"C12:" + name(sf), rep.equation, 1e6, rep.records[0].exact, rep.records[0].predicted, ratio,
                        rep.method, {}});
  }
  out.passed = ok;
  out.summary = detail + " ratios within 1% at t=1e6";
}

}  // namespace

const std::vector<Criterion>& registry() {
  static const std::vector<Criterion> r{
      {1, std::string(tags::kBackward), {}, "closed-form equivalence, ConstantL", 1.0, c1_closed_form},
      {2, std::string(tags::kIdentity), {}, "exact 1/Lambda identity", 30.0, c2_identity},
      {3, std::string(tags::kSemigroup), {}, "semigroup property", 10.0, c3_semigroup},
      {4, std::string(tags::kSurvivalLog), {std::string(tags::kSurvivalMho)}, "survival second-order term", 5.0,
       c4_survival},
      {5, std::string(tags::kP11Log), {std::string(tags::kP11Mho)}, "P_11 second-order term", 5.0, c5_p11},
      {6, std::string(tags::kGLog), {std::string(tags::kGLeading)}, "Q-process generating function", 30.0, c6_G},
      {7, std::string(tags::kLaplaceSup), {std::string(tags::kPsi)}, "Laplace transform sup distance", 60.0,
       c7_laplace},
      {8, std::string(tags::kInvariant), {std::string(tags::kPi), std::string(tags::kQMatrix)},
       "invariant measures", 120.0, c8_invariant},
      {9, std::string(tags::kTauberian), {}, "Tauberian partial sums", 10.0, c9_tauberian},
      {10, std::string(tags::kMonteCarlo), {}, "Monte Carlo triangle", 120.0, c10_monte_carlo},
      {11, std::string(tags::kKolmogorovSmirnov), {}, "Kolmogorov-Smirnov rate", 600.0, c11_ks},
      {12, std::string(tags::kFiniteVariance), {std::string(tags::kRegularVariation)}, "baselines", 5.0,
       c12_baselines},
  };
  return r;
}

std::vector<const Criterion*> select(std::string_view only) {
  const auto& reg = registry();
  std::vector<const Criterion*> out;
  if (only.empty()) {
    for (const auto& c : reg) out.push_back(&c);
    return out;
  }
  std::stringstream ss{std::string(only)};
  std::string item;
  std::vector<bool> chosen(reg.size(), false);
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    bool hit = false;
    for (std::size_t k = 0; k < reg.size(); ++k) {
      const auto& c = reg[k];
      const bool match = item == std::to_string(c.id) || item == "C" + std::to_string(c.id) || item == c.tag ||
                         std::find(c.aliases.begin(), c.aliases.end(), item) != c.aliases.end();
      if (match) chosen[k] = hit = true;
    }
    if (!hit) throw ConfigError("only", "no criterion matches '" + item + "'");
  }
  for (std::size_t k = 0; k < reg.size(); ++k)
    if (chosen[k]) out.push_back(&reg[k]);
  if (out.empty()) throw ConfigError("only", "empty selection");
  return out;
}

Outcome run(const Criterion& c, const Options& opt) {
  Outcome o;
  o.id = c.id;
  o.tag = c.tag;
  o.title = c.title;
  o.budget = c.budget_seconds;
  const auto t0 = Clock::now();
  try {
    c.body(opt, o);
  } catch (const NumericalError& e) {
    o.passed = false;
    o.numerical_failure = true;
    o.summary = std::string("numerical failure: ") + e.what();
  } catch (const std::exception& e) {
    o.passed = false;
    o.summary = std::string("error: ") + e.what();
  }
  o.seconds = seconds_since(t0);
  if (o.seconds > o.budget) {
    o.over_budget = true;
    if (opt.enforce_budget) o.passed = false;
  }
  return o;
}

std::string status_line(const Outcome& o) {
  return fmt("[%s] C%-2d %-10s %s (%.2f s of %.0f s%s): ", o.passed ? "PASS" : "FAIL", o.id, o.tag.c_str(),
             o.title.c_str(), o.seconds, o.budget, o.over_budget ? ", OVER BUDGET" : "") +
         o.summary;
}

int exit_code(const std::vector<Outcome>& outcomes) {
  bool fail = false;
  for (const auto& o : outcomes) {
    if (o.numerical_failure) return 3;
    fail = fail || !o.passed;
  }
  return fail ? 1 : 0;
}

void write_summary_csv(std::ostream& out, const std::vector<Outcome>& outcomes) {
  out << "criterion,tag,passed,seconds,budget_seconds,summary\n";
  for (const auto& o : outcomes) {
    std::string s = o.summary;
    std::replace(s.begin(), s.end(), '"', '\'');
    out << o.id << ',' << o.tag << ',' << (o.passed ? "true" : "false") << ',' << harness::format_double(o.seconds)
        << ',' << harness::format_double(o.budget) << ",\"" << s << "\"\n";
  }
}

int run_suite(std::string_view only, const Options& opt, const std::string& out_dir, std::ostream& out) {
  const auto chosen = select(only);
  std::vector<Outcome> outcomes;
  std::vector<ReportRow> rows;
  Options o = opt;
  if (!o.log) o.log = &out;
  for (const auto* c : chosen) {
    outcomes.push_back(run(*c, o));
    const auto& r = outcomes.back();
    out << status_line(r) << '\n';
    for (const auto& n : r.notes) out << "    " << n << '\n';
    out.flush();
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
  }
  std::size_t passed = 0;
  for (const auto& r : outcomes) passed += r.passed;
  out << passed << " of " << outcomes.size() << " criteria passed\n";
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    harness::write_csv_file((std::filesystem::path(out_dir) / "verify.csv").string(), rows);
    std::ofstream s(std::filesystem::path(out_dir) / "acceptance.csv", std::ios::binary);
    write_summary_csv(s, outcomes);
  }
  return exit_code(outcomes);
}

}  // namespace critlab::acceptance
