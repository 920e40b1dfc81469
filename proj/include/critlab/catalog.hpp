#pragma once

#include <array>
#include <string_view>

// Closed set of formula tags carried by report rows. Tags are the reference
// numbering of the formulas; `name` is what the code calls them.
namespace critlab::tags {

struct Entry {
  std::string_view tag;
  std::string_view name;
};

inline constexpr std::string_view kBackward = "R";            // R(t;s) from the backward equation
inline constexpr std::string_view kConvolution = "1.1";       // P_ij as i-fold convolution
inline constexpr std::string_view kFiniteVariance = "1.3";    // 1/R - 1/(1-s) ~ b t
inline constexpr std::string_view kRegularVariation = "1.4";  // q / f(1-q) ~ nu t
inline constexpr std::string_view kInverseRepr = "1.6";       // 1/R = U(t + V(1/(1-s)))
inline constexpr std::string_view kLeadingR = "1.7";          // R ~ N / (nu t)^{1/nu}
inline constexpr std::string_view kNormalizer = "1.8";
inline constexpr std::string_view kSurvivalMho = "1.13";
inline constexpr std::string_view kSurvivalLog = "1.14";
inline constexpr std::string_view kP11Mho = "1.15";
inline constexpr std::string_view kP11Log = "1.16";
inline constexpr std::string_view kQMatrix = "1.17";
inline constexpr std::string_view kGFunction = "1.19";
inline constexpr std::string_view kGLeading = "1.20";
inline constexpr std::string_view kPi = "1.21";
inline constexpr std::string_view kGLog = "1.22";
inline constexpr std::string_view kLaplaceSup = "1.23";
inline constexpr std::string_view kKolmogorovSmirnov = "1.24";
inline constexpr std::string_view kIdentity = "2.1";
inline constexpr std::string_view kMho = "2.6";
inline constexpr std::string_view kSemigroup = "semigroup";
inline constexpr std::string_view kInvariant = "invariant";
inline constexpr std::string_view kTauberian = "tauberian";
inline constexpr std::string_view kMonteCarlo = "mc";
inline constexpr std::string_view kPsi = "psi";

inline constexpr std::array<Entry, 25> kCatalog{{
    {kBackward, "backward equation solution"},
    {kConvolution, "transition probabilities by convolution"},
    {kFiniteVariance, "finite-variance baseline"},
    {kRegularVariation, "regular-variation survival ratio"},
    {kInverseRepr, "inverse-pair representation"},
    {kLeadingR, "leading order of R(t;s)"},
    {kNormalizer, "normalizer equation"},
    {kSurvivalMho, "survival probability, mho correction"},
    {kSurvivalLog, "survival probability, log correction"},
    {kP11Mho, "P_11, mho correction"},
    {kP11Log, "P_11, log correction"},
    {kQMatrix, "Q-process transition matrix"},
    {kGFunction, "Q-process generating function"},
    {kGLeading, "G(t;s) leading order"},
    {kPi, "Q-process invariant measure"},
    {kGLog, "G(t;s) log correction"},
    {kLaplaceSup, "sup of Laplace transform distance"},
    {kKolmogorovSmirnov, "Kolmogorov-Smirnov distance to the limit law"},
    {kIdentity, "exact 1/Lambda identity"},
    {kMho, "mho asymptotics"},
    {kSemigroup, "semigroup property"},
    {kInvariant, "invariant measures"},
    {kTauberian, "Tauberian partial sums"},
    {kMonteCarlo, "Monte Carlo agreement"},
    {kPsi, "finite-t Laplace transform"},
}};

constexpr bool known(std::string_view tag) {
  for (const auto& e : kCatalog)
    if (e.tag == tag) return true;
  return false;
}

}  // namespace critlab::tags
