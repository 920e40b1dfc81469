#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>

// Slowly varying scale functions and the quantities built directly on them.
//
// The branching mechanism is written near s = 1 as f(1 - y) = y * Lambda(y)
// with Lambda(y) = y^nu * L(1/y), L slowly varying at infinity, and
// y * Lambda'(y) / Lambda(y) = nu + delta(y).
namespace critlab {

enum class Family {
  ConstantL,            // L == a0, delta == 0
  DeltaEqualsLambda,    // delta == Lambda, closed form Bernoulli solution
  BinarySplitBaseline,  // f(s) = a0 (1 - s)^2, finite variance
};

std::string_view to_string(Family f);
Family family_from_string(std::string_view name);  // throws ConfigError("family", ...)

struct ModelParams {
  double nu = 0.5;
  double a0 = 1.0;
  Family family = Family::ConstantL;
};

// Evaluators of one scale family. Implementations must be immutable and
// thread-safe. Third-party families plug in here; the built-in ones are
// created by make_scale_function.
class ScaleModel {
 public:
  virtual ~ScaleModel() = default;
  virtual double L(double x) const = 0;
  virtual double Lambda(double y) const = 0;
  virtual double delta(double y) const = 0;
  // out = Lambda applied to the power series g (g[0] > 0), truncated.
  virtual void Lambda_series(std::span<const double> g, std::span<double> out) const = 0;
};

class ScaleFunction {
 public:
  ScaleFunction(ModelParams params, std::shared_ptr<const ScaleModel> model);

  const ModelParams& params() const noexcept { return params_; }
  Family family() const noexcept { return params_.family; }
  // Regular-variation index; 1 for the finite-variance baseline.
  double nu() const noexcept { return params_.nu; }
  double a0() const noexcept { return params_.a0; }

  double L(double x) const { return model_->L(x); }
  double Lambda(double y) const { return model_->Lambda(y); }
  double delta(double y) const { return model_->delta(y); }
  double epsilon(double t) const { return -model_->delta(1.0 / t); }
  // f(1 - y), evaluated without forming 1 - y.
  double f_complement(double y) const { return y * model_->Lambda(y); }
  const ScaleModel& model() const noexcept { return *model_; }

 private:
  ModelParams params_;
  std::shared_ptr<const ScaleModel> model_;
};

// Validates `params` (0 < nu < 1 for the slowly varying families, a0 > 0) and
// builds the evaluators. BinarySplitBaseline ignores params.nu and stores 1.
ScaleFunction make_scale_function(const ModelParams& params);

// L(lambda x) / L(x) - 1.
double remainder_rho(const ScaleFunction& sf, double lambda, double x);

struct Normalizer {
  double t;
  double value;
};

// Solves N^nu * L((nu t)^{1/nu} / N) = 1 for N; closed forms for ConstantL
// (a0^{-1/nu}) and BinarySplit, bracketed root solve in log N otherwise.
Normalizer solve_normalizer(const ScaleFunction& sf, double t);

// Generating function of the invariant measure of the branching process:
// M(s) = int_1^{1/(1-s)} dx / (x^{1-nu} L(x)), 0 <= s < 1.
double invariant_measure_M(const ScaleFunction& sf, double s);

// V(x) = M(1 - 1/x), x >= 1, and its inverse U(y), y >= 0.
double pakes_V(const ScaleFunction& sf, double x);
double pakes_U(const ScaleFunction& sf, double y);

// (L(1/phi(y)) / L(1/y) - 1) / Lambda(y) with phi(y) = y - y K(y).
// Only meaningful for DeltaEqualsLambda; ConstantL gives 0 identically.
double lemma3_ratio(const ScaleFunction& sf, double y, const std::function<double(double)>& K);

}  // namespace critlab
