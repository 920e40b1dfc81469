#pragma once

#include <span>
#include <vector>

// Truncated power-series kernels. A series is the coefficient vector
// c[0..J] of sum_j c[j] s^j; every operation truncates at the length of its
// output span. Coefficients up to degree J of each result depend only on the
// inputs' coefficients up to degree J, so truncation introduces no error in
// the retained coefficients.
//
// Convolution-shaped kernels come in two flavours: a plain serial reference
// and an OpenMP version. Tests hold them to bitwise-close agreement; the
// benchmark target compares their speed.
namespace critlab::series {

enum class Exec { Serial, Parallel };

// out = a * b (truncated). `out` must not alias the inputs.
void multiply_serial(std::span<const double> a, std::span<const double> b, std::span<double> out);
void multiply_parallel(std::span<const double> a, std::span<const double> b, std::span<double> out);
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out,
              Exec exec = Exec::Parallel);

// out = g^alpha for real alpha, requires g[0] > 0 (J.C.P. Miller recurrence).
void power(std::span<const double> g, double alpha, std::span<double> out);

// out = 1 / a, requires a[0] != 0.
void reciprocal(std::span<const double> a, std::span<double> out);

// out = num / den, requires den[0] != 0.
void divide(std::span<const double> num, std::span<const double> den, std::span<double> out);

// Coefficients of (1 - s)^alpha: c_k = (-1)^k binom(alpha, k), by recurrence.
std::vector<double> binomial_series(double alpha, std::size_t degree);

// Coefficients of g^i for i = 1..imax, each truncated to `degree`; row i-1
// of the result holds g^i. Row-to-row multiplication uses `exec`.
std::vector<std::vector<double>> powers(std::span<const double> g, std::size_t imax,
                                        std::size_t degree, Exec exec = Exec::Parallel);

// g^i by binary exponentiation, truncated to `degree`.
std::vector<double> integer_power(std::span<const double> g, unsigned i, std::size_t degree);

}  // namespace critlab::series
