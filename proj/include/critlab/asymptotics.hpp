#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "critlab/kolmogorov.hpp"
#include "critlab/numeric.hpp"
#include "critlab/series.hpp"
#include "critlab/sv_kernel.hpp"

// Large-t expansions of the survival probability, P_11, the Q-process
// generating function and its Laplace transform, together with the exact
// quantities they are measured against.
namespace critlab {

// predicted = leading * (1 + correction)
struct AsymptoticPrediction {
  double t = 0.0;
  double leading = 0.0;
  double correction = 0.0;
  std::string formula;  // catalog tag

  double value() const noexcept { return leading * (1.0 + correction); }
  // (exact/leading - 1) / correction, i.e. 1 when the second-order term is
  // reproduced exactly. With no correction term: (exact/leading - 1) * t.
  double normalized_error(double exact) const;
};

// Which second-order term to use. Auto picks the log form for
// DeltaEqualsLambda and the mho form otherwise.
enum class CorrectionForm { Auto, Mho, Log };

// q(t) ~ N(t)/(nu t)^{1/nu} (1 - mho(t)/(nu^2 t)), or with
// ln(a0 nu t + 1)/(nu^3 t) in place of mho/(nu^2 t).
AsymptoticPrediction predict_q(const ScaleFunction& sf, double t, CorrectionForm form = CorrectionForm::Auto,
                               const SolveConfig& cfg = {});

// (nu t)^{1+1/nu} P_11(t) ~ N(t)/a0 (1 - (1+nu)/nu^2 mho/t), or the log form
// with coefficient (1+nu)/nu^3. The prediction is for the scaled quantity.
AsymptoticPrediction predict_p11(const ScaleFunction& sf, double t, CorrectionForm form = CorrectionForm::Auto,
                                 const SolveConfig& cfg = {});
// Exact P_11(t) = q Lambda(q) / a0.
double p11_exact(const ScaleFunction& sf, double t, const SolveConfig& cfg = {});
inline double p11_scale(const ScaleFunction& sf, double t) { return std::pow(sf.nu() * t, 1.0 + 1.0 / sf.nu()); }

// (nu t)^{1+1/nu} G(t;s) ~ pi(s) N(t) (1 + rho), rho from the log form with
// argument ln(Lambda(1-s) nu t + 1) for DeltaEqualsLambda, 0 otherwise.
AsymptoticPrediction predict_G(const ScaleFunction& sf, double s, double t);

// R(t;s) (nu t)^{1/nu} / N(t), tends to 1.
double lemma1_ratio(const ScaleFunction& sf, double s, double t, const SolveConfig& cfg = {});

// pi(s) = s / f(s) = s / ((1-s)^{1+nu} L(1/(1-s))).
double pi_of(const ScaleFunction& sf, double s);

struct PiMeasure {
  std::vector<double> coeffs;        // pi_0 = 0, pi_1 .. pi_J
  std::vector<double> partial_sums;  // sum_{i<=j} pi_i
};
// pi_j = [s^{j-1}] 1/f(s), by series reciprocal of the offspring intensities.
PiMeasure pi_coeffs(const ScaleFunction& sf, std::size_t J);

// sum_{j<=n} pi_j Gamma(2+nu) / (n^{1+nu} L_pi(n)), L_pi = 1/L.
double tauberian_ratio(const ScaleFunction& sf, const PiMeasure& pi, std::size_t n);

// (1 + theta^nu)^{-(1+1/nu)}
double psi_limit(double nu, double theta);

// E exp(-theta q(t) W(t)) = G(t; exp(-theta q(t))).
double psi_finite(const ScaleFunction& sf, double t, double theta, const SolveConfig& cfg = {});

struct DeltaSup {
  double value = 0.0;
  double argmax = 0.0;
  bool at_endpoint = false;  // sup sits on the first or last grid point
  std::vector<double> theta;
  std::vector<double> delta;  // |psi_finite - psi_limit| per theta
};
std::vector<double> default_theta_grid();  // 200 log-spaced points on [1e-3, 1e3]
DeltaSup delta_sup(const ScaleFunction& sf, double t, std::span<const double> theta_grid,
                   const SolveConfig& cfg = {}, series::Exec exec = series::Exec::Parallel);

// Limit law D(x) of q(t) W(t), inverted from Psi(theta)/theta.
struct DLimit {
  std::vector<double> x;
  std::vector<double> D;         // fixed Talbot contour
  std::vector<double> D_check;   // Gaver-Stehfest
  std::vector<bool> flagged;     // |D - D_check| > 1e-4
  std::string method;
  bool any_flagged() const;
};
inline constexpr double kInversionTolerance = 1e-4;
DLimit d_limit(double nu, std::span<const double> x_grid);
double d_limit_talbot(double nu, double x, int M = 24);
double d_limit_stehfest(double nu, double x, int N = 18);
// theta int_0^inf e^{-theta x} D(x) dx with D from d_limit_talbot.
double d_limit_laplace_roundtrip(double nu, double theta);

struct VerifyRecord {
  double t;
  double exact;
  double predicted;
  double normalized_error;
  double residual;  // exact / leading - 1, the quantity rate fits regress
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double unit_slope_constant = 0.0;  // C in |res| = C ln t / t, or C / t on the log t axis
  bool accepted = false;             // r2 >= kRateFitMinR2
};
inline constexpr double kRateFitMinR2 = 0.99;

struct VerifyReport {
  std::string equation;
  std::string method;  // "ode" | "oracle" | "mc"
  std::vector<VerifyRecord> records;
  std::optional<RateFit> fit;

  void add(const VerifyRecord& r);  // keeps records sorted by t; rejects non-finite
};

// BinarySplit: residual (1/R - 1/(1-s) - a0 t) * R from the ODE.
// Otherwise the ratio q(t) / f(1 - q(t)) / (nu t), which tends to 1.
VerifyReport baseline_checks(const ScaleFunction& sf, std::span<const double> t_grid, double s,
                             const SolveConfig& cfg = {});

enum class RateAxis { LogT, LogTOverT };
// Least squares of log|residual| against log t or log(ln t / t). Requires >= 5 records spanning >= 2 decades.
RateFit fit_rate(std::span<const double> t, std::span<const double> residual, RateAxis axis);
RateFit fit_rate(const VerifyReport& report, RateAxis axis);

}  // namespace critlab
