#include "critlab/numeric.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "critlab/error.hpp"

namespace critlab::numeric {

RootResult find_root(const std::function<double(double)>& f, double lo, double hi,
                     const RootOptions& opt) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  if (!(std::isfinite(flo) && std::isfinite(fhi)) || std::signbit(flo) == std::signbit(fhi)) {
    std::ostringstream msg;
    msg << "find_root: no sign change on [" << lo << ", " << hi << "] (f = " << flo << ", "
        << fhi << ")";
    throw NumericalError(msg.str());
  }

  // Secant iterate carried between steps; falls back to bisection whenever the
  // secant point leaves the bracket or the bracket fails to halve.
  double width_prev = std::abs(hi - lo);
  for (int it = 1; it <= opt.max_iter; ++it) {
    double x = hi - fhi * (hi - lo) / (fhi - flo);
    const double mid = 0.5 * (lo + hi);
    if (!(x > std::min(lo, hi) && x < std::max(lo, hi))) x = mid;

    const double fx = f(x);
    if (fx == 0.0) return {x, 0.0, it};
    if (std::signbit(fx) == std::signbit(flo)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }

    const double width = std::abs(hi - lo);
    const double scale = std::max(std::abs(lo), std::abs(hi));
    if (width <= opt.rel_tol * scale + opt.abs_tol) {
      const bool pick_lo = std::abs(flo) < std::abs(fhi);
      return {pick_lo ? lo : hi, pick_lo ? flo : fhi, it};
    }
    // Secant stalls when one endpoint stays fixed; force a bisection step.
    if (width > 0.5 * width_prev) {
      const double m = 0.5 * (lo + hi);
      const double fm = f(m);
      if (fm == 0.0) return {m, 0.0, it};
      if (std::signbit(fm) == std::signbit(flo)) {
        lo = m;
        flo = fm;
      } else {
        hi = m;
        fhi = fm;
      }
    }
    width_prev = std::abs(hi - lo);
    if (width_prev <= opt.rel_tol * std::max(std::abs(lo), std::abs(hi)) + opt.abs_tol) {
      const bool pick_lo = std::abs(flo) < std::abs(fhi);
      return {pick_lo ? lo : hi, pick_lo ? flo : fhi, it};
    }
  }
  throw NumericalError("find_root: iteration limit reached");
}

Bracket expand_upward(const std::function<double(double)>& f, double lo, double hi,
                      double growth, int max_expansions) {
  const double flo = f(lo);
  double fhi = f(hi);
  for (int i = 0; i < max_expansions; ++i) {
    if (std::isfinite(fhi) && std::signbit(fhi) != std::signbit(flo)) return {lo, hi};
    hi = lo + (hi - lo) * growth;
    fhi = f(hi);
  }
  throw NumericalError("expand_upward: failed to bracket a root");
}

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  const QuadOptions& opt;
  bool exhausted = false;
};

double simpson_recurse(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) {
    st.exhausted = true;
    return left + right + delta / 15.0;
  }
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt) {
  if (a == b) return 0.0;
  // A coarse 16-panel pass sets the magnitude used by the relative tolerance.
  constexpr int kPanels = 16;
  const double h = (b - a) / kPanels;
  std::vector<double> xs(2 * kPanels + 1);
  std::vector<double> fs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = a + 0.5 * h * static_cast<double>(i);
    fs[i] = f(xs[i]);
  }
  xs.back() = b;
  fs.back() = f(b);
  double coarse = 0.0;
  for (int p = 0; p < kPanels; ++p) coarse += h / 6.0 * (fs[2 * p] + 4.0 * fs[2 * p + 1] + fs[2 * p + 2]);

  const double tol = std::max(opt.rel_tol * std::abs(coarse), opt.abs_floor);
  SimpsonState st{f, opt};
  double total = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double pa = xs[2 * p];
    const double pb = xs[2 * p + 2];
    const double whole = (pb - pa) / 6.0 * (fs[2 * p] + 4.0 * fs[2 * p + 1] + fs[2 * p + 2]);
    total += simpson_recurse(st, pa, pb, fs[2 * p], fs[2 * p + 1], fs[2 * p + 2], whole,
                             tol / kPanels, opt.max_depth);
  }
  if (!std::isfinite(total)) throw NumericalError("integrate: non-finite result");
  if (st.exhausted) throw NumericalError("integrate: recursion depth exhausted");
  return total;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (points == 0 || !(lo > 0.0) || !(hi >= lo)) throw DomainError("log_grid: need 0 < lo <= hi, points > 0");
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = std::exp(a + step * static_cast<double>(i));
  g.front() = lo;
  g.back() = hi;
  return g;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() != y.size() || x.size() < 2) throw DomainError("least_squares: need >= 2 paired points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("least_squares: degenerate abscissae");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return {slope, intercept, r2};
}

}  // namespace critlab::numeric
