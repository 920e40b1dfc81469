#include "critlab/sv_kernel.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "critlab/error.hpp"
#include "critlab/numeric.hpp"
#include "critlab/series.hpp"

namespace critlab {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::ConstantL: return "ConstantL";
    case Family::DeltaEqualsLambda: return "DeltaEqualsLambda";
    case Family::BinarySplitBaseline: return "BinarySplitBaseline";
  }
  return "?";
}

Family family_from_string(std::string_view name) {
  if (name == "ConstantL") return Family::ConstantL;
  if (name == "DeltaEqualsLambda") return Family::DeltaEqualsLambda;
  if (name == "BinarySplitBaseline") return Family::BinarySplitBaseline;
  throw ConfigError("family", "unknown family tag '" + std::string(name) +
                                  "' (expected ConstantL, DeltaEqualsLambda or BinarySplitBaseline)");
}

namespace {

class ConstantModel final : public ScaleModel {
 public:
  ConstantModel(double nu, double a0) : nu_(nu), a0_(a0) {}
  double L(double) const override { return a0_; }
  double Lambda(double y) const override { return a0_ * std::pow(y, nu_); }
  double delta(double) const override { return 0.0; }
  void Lambda_series(std::span<const double> g, std::span<double> out) const override {
    series::power(g, nu_, out);
    for (double& c : out) c *= a0_;
  }

 private:
  double nu_, a0_;
};

// Lambda(y) = nu a0 y^nu / (nu + a0 (1 - y^nu)): the solution of
// y Lambda' / Lambda = nu + Lambda with Lambda(1) = a0.
class DeltaLambdaModel final : public ScaleModel {
 public:
  DeltaLambdaModel(double nu, double a0) : nu_(nu), a0_(a0) {}
  double L(double x) const override {
    // 1 - x^{-nu} = -expm1(-nu ln x)
    return nu_ * a0_ / (nu_ - a0_ * std::expm1(-nu_ * std::log(x)));
  }
  double Lambda(double y) const override {
    const double lny = std::log(y);
    return nu_ * a0_ * std::exp(nu_ * lny) / (nu_ - a0_ * std::expm1(nu_ * lny));
  }
  double delta(double y) const override { return Lambda(y); }
  void Lambda_series(std::span<const double> g, std::span<double> out) const override {
    std::vector<double> p(out.size());
    series::power(g, nu_, p);
    std::vector<double> den(out.size());
    for (std::size_t k = 0; k < den.size(); ++k) den[k] = -a0_ * p[k];
    den[0] += nu_ + a0_;
    for (double& c : p) c *= nu_ * a0_;
    series::divide(p, den, out);
  }

 private:
  double nu_, a0_;
};

class BinarySplitModel final : public ScaleModel {
 public:
  explicit BinarySplitModel(double a0) : a0_(a0) {}
  double L(double) const override { return a0_; }
  double Lambda(double y) const override { return a0_ * y; }
  double delta(double) const override { return 0.0; }
  void Lambda_series(std::span<const double> g, std::span<double> out) const override {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = k < g.size() ? a0_ * g[k] : 0.0;
  }

 private:
  double a0_;
};

}  // namespace

ScaleFunction::ScaleFunction(ModelParams params, std::shared_ptr<const ScaleModel> model)
    : params_(params), model_(std::move(model)) {
  if (!model_) throw DomainError("ScaleFunction: null model");
}

ScaleFunction make_scale_function(const ModelParams& params) {
  if (!(params.a0 > 0.0) || !std::isfinite(params.a0)) {
    std::ostringstream msg;
    msg << "a0 must be positive, got " << params.a0;
    throw DomainError(msg.str());
  }
  ModelParams p = params;
  switch (params.family) {
    case Family::BinarySplitBaseline:
      p.nu = 1.0;
      return {p, std::make_shared<BinarySplitModel>(p.a0)};
    case Family::ConstantL:
    case Family::DeltaEqualsLambda:
      if (!(params.nu > 0.0 && params.nu < 1.0)) {
        std::ostringstream msg;
        msg << "nu must lie in (0,1), got " << params.nu;
        throw DomainError(msg.str());
      }
      if (params.family == Family::ConstantL) return {p, std::make_shared<ConstantModel>(p.nu, p.a0)};
      return {p, std::make_shared<DeltaLambdaModel>(p.nu, p.a0)};
  }
  throw DomainError("make_scale_function: unknown family");
}

double remainder_rho(const ScaleFunction& sf, double lambda, double x) {
  if (!(lambda > 0.0)) throw DomainError("remainder_rho: lambda must be positive");
  if (!(x >= 1.0)) throw DomainError("remainder_rho: x must be >= 1");
  return sf.L(lambda * x) / sf.L(x) - 1.0;
}

Normalizer solve_normalizer(const ScaleFunction& sf, double t) {
  if (!(t > 0.0)) throw DomainError("solve_normalizer: t must be positive");
  const double nu = sf.nu();
  if (sf.family() == Family::ConstantL || sf.family() == Family::BinarySplitBaseline)
    return {t, std::pow(sf.a0(), -1.0 / nu)};

  // h(l) = nu l + ln L(exp(ln(nu t)/nu - l)), l = ln N. h is increasing for
  // slowly varying L, and h(l0) with l0 = -ln(a0)/nu is near zero.
  const double base = std::log(nu * t) / nu;
  auto h = [&](double l) {
    const double v = sf.L(std::exp(base - l));
    return v > 0.0 && std::isfinite(v) ? nu * l + std::log(v) : std::nan("");
  };
  const double l0 = -std::log(sf.a0()) / nu;
  double lo = l0 - 1.0, hi = l0 + 1.0;
  for (int i = 0; i < 200; ++i) {
    const double flo = h(lo), fhi = h(hi);
    if (std::isfinite(flo) && std::isfinite(fhi) && flo < 0.0 && fhi > 0.0) break;
    if (!(std::isfinite(flo) && flo < 0.0)) lo = l0 - 2.0 * (l0 - lo);
    if (!(std::isfinite(fhi) && fhi > 0.0)) hi = l0 + 2.0 * (hi - l0);
    if (i == 199) throw NumericalError("solve_normalizer: no bracket");
  }
  const auto r = numeric::find_root(h, lo, hi, {.rel_tol = 0.0, .abs_tol = 1e-14, .max_iter = 200});
  return {t, std::exp(r.root)};
}

double pakes_V(const ScaleFunction& sf, double x) {
  if (!(x >= 1.0)) throw DomainError("pakes_V: x must be >= 1");
  if (x == 1.0) return 0.0;
  const double nu = sf.nu();
  // x = e^v turns the integrand into e^{nu v} / L(e^v), smooth on [0, ln x].
  auto integrand = [&](double v) { return std::exp(nu * v) / sf.L(std::exp(v)); };
  return numeric::integrate(integrand, 0.0, std::log(x), {.rel_tol = 1e-12, .abs_floor = 1e-15});
}

double invariant_measure_M(const ScaleFunction& sf, double s) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("invariant_measure_M: s must lie in [0,1)");
  return pakes_V(sf, 1.0 / (1.0 - s));
}

double pakes_U(const ScaleFunction& sf, double y) {
  if (!(y >= 0.0)) throw DomainError("pakes_U: y must be >= V(1) = 0");
  if (y == 0.0) return 1.0;
  auto g = [&](double lx) { return pakes_V(sf, std::exp(lx)) - y; };
  const auto br = numeric::expand_upward(g, 0.0, 1.0, 2.0, 64);
  const auto r = numeric::find_root(g, br.lo, br.hi, {.rel_tol = 0.0, .abs_tol = 1e-14});
  return std::exp(r.root);
}

double lemma3_ratio(const ScaleFunction& sf, double y, const std::function<double(double)>& K) {
  if (!(y > 0.0 && y < 1.0)) throw DomainError("lemma3_ratio: y must lie in (0,1)");
  const double k = K(y);
  if (!(y * k >= 0.0 && y * k < y)) throw DomainError("lemma3_ratio: need 0 <= y K(y) < y");
  const double phi = y - y * k;
  return (sf.L(1.0 / phi) / sf.L(1.0 / y) - 1.0) / sf.Lambda(y);
}

}  // namespace critlab
