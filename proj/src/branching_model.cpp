#include "critlab/branching_model.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "critlab/error.hpp"
#include "critlab/series.hpp"

namespace critlab {

double f_of(const ScaleFunction& sf, double s) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("f_of: s must lie in [0,1)");
  return sf.f_complement(1.0 - s);
}

namespace {

bool is_integer(double a) { return std::abs(a - std::round(a)) < 1e-12; }

// 1 / Gamma(-alpha); zero for non-negative integer alpha.
double inv_gamma_neg(double alpha) {
  if (is_integer(alpha)) return 0.0;
  return 1.0 / boost::math::tgamma(-alpha);
}

// The intensities of every built-in family are sums c_m (1-s)^{alpha_m}:
//   ConstantL           a0 (1-s)^{1+nu}
//   DeltaEqualsLambda   K0 sum_m r^m (1-s)^{1+(m+1) nu},  K0 = nu a0/(nu+a0), r = a0/(nu+a0)
//   BinarySplit         a0 (1-s)^2
// `term(alpha)` returns the contribution of one (1-s)^alpha component; the
// result is sum_m c_m term(alpha_m).
template <class Term>
double sum_components(const ScaleFunction& sf, double scale_k, Term&& term) {
  const double nu = sf.nu();
  const double a0 = sf.a0();
  switch (sf.family()) {
    case Family::ConstantL: return a0 * term(1.0 + nu);
    case Family::BinarySplitBaseline: return a0 * term(2.0);
    case Family::DeltaEqualsLambda: break;
  }
  const double K0 = nu * a0 / (nu + a0);
  const double r = a0 / (nu + a0);
  double sum = 0.0;
  double weight = 1.0;
  double prev = 0.0;
  for (int m = 0; m < 20000; ++m, weight *= r) {
    if (weight < 1e-300) break;
    // For large k every later term is below weight * k^{-alpha} in size.
    if (scale_k >= 64.0 && m >= 1 && weight < 1e-20) break;
    const double alpha = 1.0 + (m + 1) * nu;
    const double t = weight * term(alpha);
    sum += t;
    // Past alpha > k the terms decrease geometrically; stop when the
    // remaining tail is below double resolution.
    if (m >= 4 && alpha > scale_k + 1.0 && std::abs(t) < std::abs(prev)) {
      const double ratio = std::abs(t / prev);
      if (ratio < 1.0 && std::abs(t) * ratio / (1.0 - ratio) <= 1e-18 * std::abs(sum)) break;
    }
    if (m >= 4 && t == 0.0 && prev == 0.0) break;
    prev = t;
  }
  return K0 * sum;
}

}  // namespace

double binomial_coeff_signed(double alpha, std::uint64_t k) {
  if (k == 0) return 1.0;
  const auto kd = static_cast<double>(k);
  if (k <= 64 || alpha >= kd - 1.0) {
    double c = 1.0;
    for (std::uint64_t i = 1; i <= k; ++i) {
      c *= (static_cast<double>(i) - 1.0 - alpha) / static_cast<double>(i);
      if (c == 0.0) break;
    }
    return c;
  }
  // Gamma(k - alpha) / (Gamma(-alpha) Gamma(k + 1))
  return inv_gamma_neg(alpha) * boost::math::tgamma_delta_ratio(kd - alpha, 1.0 + alpha);
}

double exact_coeff(const ScaleFunction& sf, std::uint64_t k) {
  return sum_components(sf, static_cast<double>(k),
                        [k](double alpha) { return binomial_coeff_signed(alpha, k); });
}

namespace {

// sum_{k >= K} c_k(alpha) and sum_{k >= K} k c_k(alpha) for the coefficients
// of (1-s)^alpha. Telescoping Gamma identities when K > alpha + 1, otherwise
// the finite complement (the full sums vanish for alpha > 1).
double component_tail(double alpha, std::uint64_t K) {
  const auto Kd = static_cast<double>(K);
  if (Kd > alpha + 1.0)
    return inv_gamma_neg(alpha) * boost::math::tgamma_delta_ratio(Kd - alpha, alpha) / alpha;
  double s = 0.0;
  for (std::uint64_t k = 0; k < K; ++k) s += binomial_coeff_signed(alpha, k);
  return -s;
}

double component_drift_tail(double alpha, std::uint64_t K) {
  const auto Kd = static_cast<double>(K);
  if (Kd > alpha + 1.0)
    return inv_gamma_neg(alpha) * boost::math::tgamma_delta_ratio(Kd - alpha, alpha - 1.0) / (alpha - 1.0);
  double s = 0.0;
  for (std::uint64_t k = 1; k < K; ++k) s += static_cast<double>(k) * binomial_coeff_signed(alpha, k);
  return -s;
}

}  // namespace

double tail_mass(const ScaleFunction& sf, std::uint64_t K) {
  if (K < 2) throw DomainError("tail_mass: K must be >= 2");
  return sum_components(sf, static_cast<double>(K), [K](double a) { return component_tail(a, K); });
}

double tail_drift(const ScaleFunction& sf, std::uint64_t K) {
  if (K < 2) throw DomainError("tail_drift: K must be >= 2");
  return sum_components(sf, static_cast<double>(K), [K](double a) { return component_drift_tail(a, K); });
}

OffspringCoeffs expand_coeffs(const ScaleFunction& sf, std::size_t J) {
  if (J < 2) throw DomainError("expand_coeffs: J must be >= 2");
  OffspringCoeffs out;
  out.coeffs.assign(J + 1, 0.0);
  const double a0 = sf.a0();
  switch (sf.family()) {
    case Family::ConstantL: {
      const auto b = series::binomial_series(1.0 + sf.nu(), J);
      for (std::size_t j = 0; j <= J; ++j) out.coeffs[j] = a0 * b[j];
      break;
    }
    case Family::BinarySplitBaseline:
      out.coeffs[0] = a0;
      out.coeffs[1] = -2.0 * a0;
      out.coeffs[2] = a0;
      break;
    case Family::DeltaEqualsLambda: {
      // f(s) = g Lambda(g) with g = 1 - s, composed on the series level.
      std::vector<double> g(J + 1, 0.0);
      g[0] = 1.0;
      g[1] = -1.0;
      std::vector<double> lam(J + 1);
      sf.model().Lambda_series(g, lam);
      series::multiply(g, lam, out.coeffs);
      break;
    }
  }
  out.tail_exponent = 2.0 + sf.nu();

  const auto& a = out.coeffs;
  double mass = 0.0, drift = 0.0, scale = 0.0;
  for (std::size_t j = 0; j <= J; ++j) {
    mass += a[j];
    drift += static_cast<double>(j) * a[j];
    scale += std::abs(a[j]);
  }
  out.mass_deficit = std::abs(mass);
  out.drift_deficit = std::abs(drift);
  out.declared_mass_tail = tail_mass(sf, J + 1);
  out.declared_drift_tail = tail_drift(sf, J + 1);

  std::ostringstream why;
  if (!(a[0] > 0.0)) why << "a_0 = " << a[0] << " is not positive; ";
  if (!(a[1] < 0.0)) why << "a_1 = " << a[1] << " is not negative; ";
  for (std::size_t j = 2; j <= J; ++j) {
    if (a[j] < -1e-12) {
      why << "a_" << j << " = " << a[j] << " is negative; ";
      break;
    }
  }
  // sum a_j = -(tail), sum j a_j = -(drift tail): f(1) = 0 and f'(1) = 0.
  const double tol = 1e-9 * scale;
  if (std::abs(mass + out.declared_mass_tail) > tol)
    why << "mass deficit " << out.mass_deficit << " disagrees with analytic tail " << out.declared_mass_tail << "; ";
  if (std::abs(drift + out.declared_drift_tail) > tol)
    why << "drift deficit " << out.drift_deficit << " disagrees with analytic tail " << out.declared_drift_tail << "; ";
  const std::string problems = why.str();
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "expand_coeffs: (" << to_string(sf.family()) << ", nu=" << sf.nu() << ", a0=" << a0
        << ") is not a valid critical branching mechanism: " << problems;
    throw DomainError(msg.str());
  }
  return out;
}

std::vector<double> coefficient_table(const ScaleFunction& sf, std::uint64_t J) {
  if (sf.family() == Family::DeltaEqualsLambda && J > 1024) {
    std::vector<double> a = expand_coeffs(sf, 1024).coeffs;
    a.resize(J + 1);
    for (std::uint64_t k = 1025; k <= J; ++k) a[k] = exact_coeff(sf, k);
    return a;
  }
  return expand_coeffs(sf, std::max<std::size_t>(J, 2)).coeffs;
}

// --- AliasTable -------------------------------------------------------------

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw DomainError("AliasTable: empty weights");
  total_ = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw DomainError("AliasTable: negative weight");
    total_ += w;
  }
  if (!(total_ > 0.0)) throw DomainError("AliasTable: zero total weight");
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total_;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto l : large) prob_[l] = 1.0;
  for (auto s : small) prob_[s] = 1.0;  // roundoff leftovers
}

std::size_t AliasTable::sample(Rng& rng) const {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double u = u01(rng) * static_cast<double>(prob_.size());
  auto i = static_cast<std::size_t>(u);
  if (i >= prob_.size()) i = prob_.size() - 1;
  const double frac = u - static_cast<double>(i);
  return frac < prob_[i] ? i : alias_[i];
}

// --- ParetoTail -------------------------------------------------------------

ParetoTail::ParetoTail(std::uint64_t J, double beta, std::function<double(std::uint64_t)> weight)
    : J_(J), beta_(beta), weight_(std::move(weight)) {
  if (!(beta > 1.0)) throw DomainError("ParetoTail: beta must exceed 1");
  // Envelope constant: sup_k w(k) / cell_mass(k) over a dense start plus a
  // geometric sweep; the ratio tends to a constant as k grows.
  double sup = 0.0;
  auto probe = [&](double k) {
    const auto ki = static_cast<std::uint64_t>(k);
    sup = std::max(sup, weight_(ki) / cell_mass(static_cast<double>(ki)));
  };
  for (std::uint64_t k = J + 1; k <= J + 256; ++k) probe(static_cast<double>(k));
  for (double k = static_cast<double>(J) + 257.0; k < 1e15; k *= 1.05) probe(k);
  bound_ = sup * (1.0 + 1e-9);
}

double ParetoTail::cell_mass(double k) const {
  const double e = 1.0 - beta_;
  return (std::pow(k - 0.5, e) - std::pow(k + 0.5, e)) / (beta_ - 1.0);
}

std::uint64_t ParetoTail::sample(Rng& rng) const {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double x0 = static_cast<double>(J_) + 0.5;
  constexpr double kSaturate = 4.0e18;
  for (;;) {
    const double u = 1.0 - u01(rng);  // (0, 1]
    const double x = x0 * std::pow(u, -1.0 / (beta_ - 1.0));
    if (!(x < kSaturate)) return static_cast<std::uint64_t>(kSaturate);
    const double k = std::floor(x + 0.5);
    const double accept = weight_(static_cast<std::uint64_t>(k)) / (bound_ * cell_mass(k));
    if (u01(rng) < accept) return static_cast<std::uint64_t>(k);
  }
}

// --- OffspringDistribution ----------------------------------------------------

OffspringDistribution::OffspringDistribution(const ScaleFunction& sf, std::uint64_t J)
    : sf_(sf), nu_(sf.nu()) {
  const bool finite_support = sf.family() == Family::BinarySplitBaseline;
  J_ = finite_support ? 2 : std::max<std::uint64_t>(J, 2);
  coeffs_ = coefficient_table(sf, J_);
  build_tables(!finite_support);
}

OffspringDistribution OffspringDistribution::finite(std::vector<double> coeffs) {
  if (coeffs.size() < 2 || !(coeffs[1] < 0.0))
    throw DomainError("OffspringDistribution::finite: need a_1 < 0");
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    if (k != 1 && coeffs[k] < 0.0) throw DomainError("OffspringDistribution::finite: a_k must be >= 0 for k != 1");
  OffspringDistribution d;
  d.J_ = coeffs.size() - 1;
  d.coeffs_ = std::move(coeffs);
  d.build_tables(false);
  return d;
}

void OffspringDistribution::build_tables(bool with_tail) {
  rate_ = -coeffs_[1];
  std::vector<double> plain(J_ + 2, 0.0), biased(J_ + 2, 0.0);
  for (std::uint64_t k = 0; k <= J_; ++k) {
    if (k == 1) continue;
    const double a = std::max(coeffs_[k], 0.0);
    plain[k] = a;
    biased[k] = static_cast<double>(k) * a;
    table_mass_ += a;
    table_drift_ += static_cast<double>(k) * a;
  }
  if (with_tail) {
    tail_mass_ = tail_mass(*sf_, J_ + 1);
    tail_drift_ = tail_drift(*sf_, J_ + 1);
    plain[J_ + 1] = tail_mass_;
    biased[J_ + 1] = tail_drift_;
    const ScaleFunction model = *sf_;
    plain_tail_ = ParetoTail(J_, 2.0 + nu_, [model](std::uint64_t k) { return exact_coeff(model, k); });
    biased_tail_ = ParetoTail(J_, 1.0 + nu_, [model](std::uint64_t k) {
      return static_cast<double>(k) * exact_coeff(model, k);
    });
  }
  plain_ = AliasTable(plain);
  // A subcritical finite law may have no size-biased mass beyond k = 0.
  if (table_drift_ + tail_drift_ > 0.0) biased_ = AliasTable(biased);
}

double OffspringDistribution::prob(std::uint64_t k) const {
  if (k == 1) return 0.0;
  if (k <= J_) return std::max(coeffs_[k], 0.0) / rate_;
  if (!sf_ || sf_->family() == Family::BinarySplitBaseline) return 0.0;
  return exact_coeff(*sf_, k) / rate_;
}

std::uint64_t OffspringDistribution::sample(Rng& rng) const {
  const auto k = plain_.sample(rng);
  return k <= J_ ? k : plain_tail_.sample(rng);
}

std::uint64_t OffspringDistribution::sample_size_biased(Rng& rng) const {
  if (biased_.size() == 0) throw DomainError("sample_size_biased: law has no size-biased mass");
  const auto k = biased_.sample(rng);
  return k <= J_ ? k : biased_tail_.sample(rng);
}

double OffspringDistribution::qprocess_row_sum(std::uint64_t i) const {
  if (i == 0) throw DomainError("qprocess_row_sum: state must be >= 1");
  const auto id = static_cast<double>(i);
  return ((id - 1.0) * (table_mass_ + tail_mass_) + (table_drift_ + tail_drift_)) / (id * rate_);
}

}  // namespace critlab
