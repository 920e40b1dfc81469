#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "critlab/sv_kernel.hpp"

namespace critlab {

using Rng = std::mt19937_64;

// f(s) for 0 <= s < 1. The limit f(1-) is kFAtOne.
double f_of(const ScaleFunction& sf, double s);
inline constexpr double kFAtOne = 0.0;

struct OffspringCoeffs {
  std::vector<double> coeffs;  // a_0 .. a_J
  double tail_exponent = 0.0;  // a_j ~ C j^{-tail_exponent}
  double mass_deficit = 0.0;   // |sum_{j<=J} a_j|
  double drift_deficit = 0.0;  // |sum_{j<=J} j a_j|
  // Analytic values of the truncated tails sum_{j>J} a_j and sum_{j>J} j a_j;
  // the deficits must agree with them.
  double declared_mass_tail = 0.0;
  double declared_drift_tail = 0.0;

  std::size_t order() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

// Intensities a_0..a_J of f(s) = sum a_j s^j. ConstantL uses the binomial
// recurrence, DeltaEqualsLambda power-series division, BinarySplit is exact.
// Throws DomainError when the result is not a valid critical mechanism
// (a_0 <= 0, a_1 >= 0, some a_j < -1e-12 for j >= 2, or deficits that
// disagree with the analytic tails).
OffspringCoeffs expand_coeffs(const ScaleFunction& sf, std::size_t J);

// Closed-form a_k for any k (binomial expansions of the (1-s)^alpha terms).
double exact_coeff(const ScaleFunction& sf, std::uint64_t k);
// sum_{k >= K} a_k and sum_{k >= K} k a_k, K >= 2.
double tail_mass(const ScaleFunction& sf, std::uint64_t K);
double tail_drift(const ScaleFunction& sf, std::uint64_t K);

// Coefficients of (1-s)^alpha, (-1)^k binom(alpha, k), valid for large k.
double binomial_coeff_signed(double alpha, std::uint64_t k);

// Walker/Vose alias table: O(1) draws from a finite weight vector.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);
  std::size_t sample(Rng& rng) const;
  std::size_t size() const noexcept { return prob_.size(); }
  double total_weight() const noexcept { return total_; }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
  double total_ = 0.0;
};

// Integer tail k > J drawn exactly from weights w(k) via a continuous Pareto
// envelope x^{-beta} on [J + 1/2, inf), rounding, and rejection against the
// exact weight.
class ParetoTail {
 public:
  ParetoTail() = default;
  ParetoTail(std::uint64_t J, double beta, std::function<double(std::uint64_t)> weight);
  std::uint64_t sample(Rng& rng) const;
  double envelope_constant() const noexcept { return bound_; }

 private:
  double cell_mass(double k) const;
  std::uint64_t J_ = 0;
  double beta_ = 0.0;
  double bound_ = 0.0;
  std::function<double(std::uint64_t)> weight_;
};

// Jump law of the branching process: at rate |a_1| an individual is replaced
// by k != 1 offspring with probability p_k = a_k / |a_1|. The size-biased
// law k a_k / |a_1| drives the spine of the Q-process.
class OffspringDistribution {
 public:
  static constexpr std::uint64_t kDefaultTableSize = 1u << 16;

  OffspringDistribution(const ScaleFunction& sf, std::uint64_t J = kDefaultTableSize);
  // Finite mechanism a_0..a_K given directly (a_1 < 0, the rest >= 0);
  // need not be critical.
  static OffspringDistribution finite(std::vector<double> coeffs);

  double jump_rate() const noexcept { return rate_; }  // |a_1|
  std::uint64_t tail_cutoff() const noexcept { return J_; }
  double tail_exponent() const noexcept { return 2.0 + nu_; }
  double prob(std::uint64_t k) const;                 // p_k, any k
  double table_mass() const noexcept { return table_mass_; }
  double tail_prob() const noexcept { return tail_mass_ / rate_; }
  double size_biased_tail_prob() const noexcept { return tail_drift_ / rate_; }

  std::uint64_t sample(Rng& rng) const;
  std::uint64_t sample_size_biased(Rng& rng) const;

  // Sum over k != 1 of (i + k - 1) a_k / (i |a_1|); equals 1 analytically.
  double qprocess_row_sum(std::uint64_t i) const;

 private:
  OffspringDistribution() = default;
  void build_tables(bool with_tail);

  std::optional<ScaleFunction> sf_;
  double nu_ = 0.0;
  std::uint64_t J_ = 0;
  double rate_ = 0.0;
  std::vector<double> coeffs_;
  double table_mass_ = 0.0, table_drift_ = 0.0;
  double tail_mass_ = 0.0, tail_drift_ = 0.0;
  AliasTable plain_, biased_;  // last bin of each is the tail
  ParetoTail plain_tail_, biased_tail_;
};

// One offspring count k != 1: alias table for k <= J, Pareto-envelope
// rejection beyond.
inline std::uint64_t sample_offspring(const OffspringDistribution& dist, Rng& rng) { return dist.sample(rng); }

// Coefficient vector a_0..a_J for sampling tables (closed form for large J).
std::vector<double> coefficient_table(const ScaleFunction& sf, std::uint64_t J);

}  // namespace critlab
