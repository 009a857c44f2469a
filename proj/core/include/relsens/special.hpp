#pragma once

#include <cstddef>
#include <vector>

namespace relsens {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Standard normal density.
double normal_pdf(double x) noexcept;

/// Standard normal CDF, via Cody's rational Chebyshev erfc. Full relative
/// precision in the lower tail; infinite arguments give 0 or 1.
double normal_cdf(double x) noexcept;

/// Upper tail 1 - normal_cdf(x), computed without cancellation.
double normal_sf(double x) noexcept;

/// Standard normal quantile (Wichura AS241). Throws OutOfDomain unless
/// 0 < p < 1.
double normal_inv_cdf(double p);

/// Quantile of the upper tail: returns x with normal_sf(x) = q.
double normal_inv_sf(double q);

/// P[Z1 <= x1, Z2 <= x2] for standard normals with correlation r.
/// Drezner-Wesolowsky / Genz Gauss-Legendre scheme; r = +-1 handled by the
/// univariate reductions. Throws InvalidCorrelation for |r| > 1.
double bivariate_normal_cdf(double x1, double x2, double r);

struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;  ///< normalized to sum to one
};

/// Gauss-Hermite rule for expectations under a standard normal weight
/// (probabilists' form): E[f(Z)] ~ sum w_k f(z_k).
const GaussHermiteRule& gauss_hermite_rule(std::size_t points);

}  // namespace relsens
