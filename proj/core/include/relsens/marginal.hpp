#pragma once

#include <array>
#include <string_view>

namespace relsens {

enum class Distribution { Normal, Lognormal, Gumbel, Weibull };

std::string_view to_string(Distribution kind) noexcept;
Distribution distribution_from_string(std::string_view name);

/// Counts Phi^-1 arguments clamped away from {0, 1} during transforms.
struct TransformDiagnostics {
  std::size_t clamped = 0;
};

/// A univariate continuous distribution.
///
/// Native parameters per kind:
///   Normal     (mean, standard deviation)
///   Lognormal  (mu_ln, sigma_ln)      mean and sd of ln X
///   Gumbel     (location, scale)      largest-value type I
///   Weibull    (shape, scale)         two-parameter, support x > 0
class Marginal {
 public:
  static Marginal normal(double mean, double sd);
  static Marginal lognormal(double mu_ln, double sigma_ln);
  static Marginal gumbel(double location, double scale);
  static Marginal weibull(double shape, double scale);

  /// Fit native parameters from mean and coefficient of variation.
  static Marginal from_moments(Distribution kind, double mean, double cov);

  Distribution kind() const noexcept { return kind_; }
  const std::array<double, 2>& params() const noexcept { return params_; }

  double mean() const noexcept;
  double stddev() const noexcept;
  /// Coefficient of variation, stddev / |mean|.
  double cov() const noexcept;

  bool in_support(double x) const noexcept;
  /// Lower end of the support (-inf for unbounded).
  double support_lower() const noexcept;

  double pdf(double x) const noexcept;
  double log_pdf(double x) const noexcept;
  double cdf(double x) const noexcept;
  /// Survival function 1 - cdf(x) without cancellation.
  double sf(double x) const noexcept;
  /// Quantile; throws OutOfDomain unless 0 < p < 1.
  double inv_cdf(double p) const;
  /// Upper-tail quantile: x with sf(x) = q.
  double inv_sf(double q) const;

  /// z = Phi^-1(F(x)), evaluated on whichever tail keeps full precision.
  /// Probabilities below 1e-300 are clamped and counted in `diag`.
  /// Throws DomainError if x lies outside the support.
  double to_standard(double x, TransformDiagnostics* diag = nullptr) const;
  /// Inverse of to_standard: x = F^-1(Phi(z)).
  double from_standard(double z) const;
  /// dz/dx at x, i.e. pdf(x) / phi(z(x)).
  double standard_jacobian(double x) const;

 private:
  Marginal(Distribution kind, double p0, double p1) : kind_(kind), params_{p0, p1} {}

  Distribution kind_;
  std::array<double, 2> params_;
};

}  // namespace relsens
