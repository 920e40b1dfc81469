#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace critlab::numeric {

struct RootOptions {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int max_iter = 200;
};

struct RootResult {
  double root;
  double residual;
  int iterations;
};

// Root of a continuous f on [lo, hi] with f(lo), f(hi) of opposite sign.
// Bisection safeguarded secant steps; the bracket shrinks every iteration.
// Throws NumericalError when the endpoints do not bracket a sign change.
RootResult find_root(const std::function<double(double)>& f, double lo, double hi,
                     const RootOptions& opt = {});

// Expands [lo, hi] geometrically towards `hi` (factor applied to the distance
// from lo) until f changes sign. Returns the final bracket.
struct Bracket {
  double lo;
  double hi;
};
Bracket expand_upward(const std::function<double(double)>& f, double lo, double hi,
                      double growth = 2.0, int max_expansions = 200);

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_floor = 1e-15;
  int max_depth = 50;
};

// Adaptive interval-halving Simpson rule with Richardson correction.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt = {});

std::vector<double> log_grid(double lo, double hi, std::size_t points);

// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
  double slope;
  double intercept;
  double r2;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

// Relative difference |a - b| / |b| (absolute when b == 0).
inline double rel_diff(double a, double b) {
  const double d = std::abs(a - b);
  return b == 0.0 ? d : d / std::abs(b);
}

}  // namespace critlab::numeric
