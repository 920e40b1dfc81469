#include "critlab/series.hpp"

#include <algorithm>
#include <cmath>

#include "critlab/error.hpp"

namespace critlab::series {

void multiply_serial(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  const std::size_t n = out.size();
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    const std::size_t lo = k >= b.size() ? k - b.size() + 1 : 0;
    const std::size_t hi = std::min(k, a.size() == 0 ? 0 : a.size() - 1);
    for (std::size_t i = lo; i <= hi && i < a.size(); ++i) acc += a[i] * b[k - i];
    out[k] = acc;
  }
}

void multiply_parallel(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  const auto n = static_cast<long>(out.size());
  const auto na = static_cast<long>(a.size());
  const auto nb = static_cast<long>(b.size());
#pragma omp parallel for schedule(static, 64)
  for (long k = 0; k < n; ++k) {
    double acc = 0.0;
    const long lo = k >= nb ? k - nb + 1 : 0;
    const long hi = std::min(k, na - 1);
    for (long i = lo; i <= hi; ++i) acc += a[i] * b[k - i];
    out[k] = acc;
  }
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out, Exec exec) {
  if (exec == Exec::Parallel)
    multiply_parallel(a, b, out);
  else
    multiply_serial(a, b, out);
}

void power(std::span<const double> g, double alpha, std::span<double> out) {
  if (out.empty()) return;
  if (g.empty() || !(g[0] > 0.0)) throw DomainError("series::power: leading coefficient must be positive");
  const std::size_t n = out.size();
  const double g0 = g[0];
  out[0] = std::pow(g0, alpha);
  for (std::size_t m = 1; m < n; ++m) {
    double acc = 0.0;
    const std::size_t top = std::min(m, g.size() - 1);
    for (std::size_t k = 1; k <= top; ++k)
      acc += ((alpha + 1.0) * static_cast<double>(k) - static_cast<double>(m)) * g[k] * out[m - k];
    out[m] = acc / (static_cast<double>(m) * g0);
  }
}

void reciprocal(std::span<const double> a, std::span<double> out) {
  if (out.empty()) return;
  if (a.empty() || a[0] == 0.0) throw DomainError("series::reciprocal: zero leading coefficient");
  const double inv = 1.0 / a[0];
  out[0] = inv;
  for (std::size_t m = 1; m < out.size(); ++m) {
    double acc = 0.0;
    const std::size_t top = std::min(m, a.size() - 1);
    for (std::size_t k = 1; k <= top; ++k) acc += a[k] * out[m - k];
    out[m] = -acc * inv;
  }
}

void divide(std::span<const double> num, std::span<const double> den, std::span<double> out) {
  if (out.empty()) return;
  if (den.empty() || den[0] == 0.0) throw DomainError("series::divide: zero leading coefficient");
  const double inv = 1.0 / den[0];
  for (std::size_t m = 0; m < out.size(); ++m) {
    double acc = m < num.size() ? num[m] : 0.0;
    const std::size_t top = std::min(m, den.size() - 1);
    for (std::size_t k = 1; k <= top; ++k) acc -= den[k] * out[m - k];
    out[m] = acc * inv;
  }
}

std::vector<double> binomial_series(double alpha, std::size_t degree) {
  std::vector<double> c(degree + 1);
  c[0] = 1.0;
  for (std::size_t k = 1; k <= degree; ++k)
    c[k] = c[k - 1] * (static_cast<double>(k) - 1.0 - alpha) / static_cast<double>(k);
  return c;
}

std::vector<std::vector<double>> powers(std::span<const double> g, std::size_t imax,
                                        std::size_t degree, Exec exec) {
  std::vector<std::vector<double>> rows;
  rows.reserve(imax);
  std::vector<double> base(degree + 1, 0.0);
  std::copy_n(g.begin(), std::min(g.size(), degree + 1), base.begin());
  if (imax == 0) return rows;
  rows.push_back(base);
  for (std::size_t i = 2; i <= imax; ++i) {
    std::vector<double> next(degree + 1);
    multiply(rows.back(), base, next, exec);
    rows.push_back(std::move(next));
  }
  return rows;
}

std::vector<double> integer_power(std::span<const double> g, unsigned i, std::size_t degree) {
  std::vector<double> result(degree + 1, 0.0);
  result[0] = 1.0;
  std::vector<double> base(degree + 1, 0.0);
  std::copy_n(g.begin(), std::min(g.size(), degree + 1), base.begin());
  std::vector<double> tmp(degree + 1);
  while (i > 0) {
    if (i & 1u) {
      multiply(result, base, tmp);
      result.swap(tmp);
    }
    i >>= 1u;
    if (i > 0) {
      multiply(base, base, tmp);
      base.swap(tmp);
    }
  }
  return result;
}

}  // namespace critlab::series
