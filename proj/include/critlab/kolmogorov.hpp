#pragma once

#include <optional>
#include <string>
#include <vector>

#include "critlab/branching_model.hpp"
#include "critlab/series.hpp"
#include "critlab/sv_kernel.hpp"

// Evolution of the generating function F(t;s) of a Markov branching process
// started from one individual: dF/dt = f(F), F(0;s) = s. Results are
// reported through R(t;s) = 1 - F(t;s) so that tiny survival probabilities
// keep full relative precision. Functions with a `_c` suffix take the
// complement y = 1 - s directly.
namespace critlab {

struct SolveConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  double max_step = 0.0;           // 0: unbounded
  std::string method = "dopri5";  // embedded Dormand-Prince 5(4)
  double mass_defect_max = 1e-3;  // series truncation guard

  void validate() const;  // tolerances must lie in [1e-14, 1e-3]
};

struct Rts {
  double t;
  double s;
  double value;  // R(t;s)
};

// Adaptive integration of the backward equation, carried in ln R:
// d ln R / dt = -Lambda(R).
Rts solve_F(const ScaleFunction& sf, double s, double t, const SolveConfig& cfg = {});
double solve_R_c(const ScaleFunction& sf, double y, double t, const SolveConfig& cfg = {});

// DeltaEqualsLambda only: with w = 1/Lambda(R), the backward equation
// becomes dw/dt = nu + 1/w, i.e. w/nu - ln(nu w + 1)/nu^2 = t + const.
// Solved for w - w0 by a monotone root solve, then Lambda is inverted in
// closed form. Exact at any t.
Rts exact_R_deltaL(const ModelParams& params, double s, double t);
double exact_R_deltaL_c(const ModelParams& params, double y, double t);

// Closed-form R(t; 1-y) where one exists (all built-in families).
std::optional<double> exact_R_c(const ScaleFunction& sf, double y, double t);

// Large-t policy: t above kOracleHorizon goes to the closed form when the
// family has one; everything else integrates the ODE.
inline constexpr double kOracleHorizon = 1e4;
double survival_R_c(const ScaleFunction& sf, double y, double t, const SolveConfig& cfg = {});
inline double survival_q(const ScaleFunction& sf, double t, const SolveConfig& cfg = {}) {
  return survival_R_c(sf, 1.0, t, cfg);
}

// int_0^t delta(R(u;s)) du. Integrated alongside ln R by the same adaptive
// controller for t <= kOracleHorizon; beyond it, for DeltaEqualsLambda,
// read off the exact identity 1/Lambda(R) - 1/Lambda(1-s) - nu t.
double mho(const ScaleFunction& sf, double s, double t, const SolveConfig& cfg = {});
double mho_c(const ScaleFunction& sf, double y, double t, const SolveConfig& cfg = {});

// [1/Lambda(R(t;s)) - 1/Lambda(1-s)] - [nu t + mho(t;s)] from one ODE pass.
double identity_lemma2_residual(const ScaleFunction& sf, double s, double t,
                                const SolveConfig& cfg = {});

// Lambda(1-s) nu t + 1, the argument of the logarithm in the DeltaEqualsLambda
// solution (renamed: nu alone is the variation index).
double nu_ts(const ScaleFunction& sf, double s, double t);

// G(t;s) = s f(F(t;s)) / f(s), the generating function of the Q-process
// started from one individual.
double G_of(const ScaleFunction& sf, double s, double t, const SolveConfig& cfg = {});
double G_of_c(const ScaleFunction& sf, double s, double y, double t, const SolveConfig& cfg = {});

struct SeriesState {
  double t = 0.0;
  std::vector<double> coeffs;  // F_j(t) = P_{1j}(t), j = 0..J
  double mass_defect = 0.0;    // 1 - sum_j F_j

  std::size_t order() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

// Integrates dF_j/dt = [f(F)]_j for j = 0..J, composing f on the series
// level through Lambda_series. Throws NumericalError when the mass beyond J
// exceeds cfg.mass_defect_max.
SeriesState evolve_series(const ScaleFunction& sf, std::size_t J, double t, const SolveConfig& cfg = {},
                          series::Exec exec = series::Exec::Parallel);

// P_{ij}(t) = [s^j] F(t;s)^i for i = 1..imax, j = 0..jmax (jmax <= J).
// Row i-1 of the result is state i.
std::vector<std::vector<double>> transition_matrix(const SeriesState& st, std::size_t imax,
                                                   std::size_t jmax,
                                                   series::Exec exec = series::Exec::Parallel);
// Single row by binary exponentiation.
std::vector<double> transition_row(const SeriesState& st, unsigned i, std::size_t jmax);

struct QMatrix {
  std::vector<std::vector<double>> q;  // q[i-1][j] = Q_{ij}(t), j = 0..jmax
  std::vector<double> row_defect;      // 1 - sum_j Q_{ij}
  std::vector<double> defect_bound;    // union bound from the truncated tails of F and G
};

// Q_{ij}(t) = (j / i) P_{ij}(t).
QMatrix q_matrix(const SeriesState& st, std::size_t imax, std::size_t jmax,
                 series::Exec exec = series::Exec::Parallel);
QMatrix q_matrix(const ScaleFunction& sf, std::size_t J, double t, const SolveConfig& cfg = {});

// Invariant measure of the branching process: coefficients of
// M(s) = int_0^s du / f(u), mu_0 = 0.
std::vector<double> mbp_invariant_coeffs(const ScaleFunction& sf, std::size_t J);

}  // namespace critlab
