#pragma once

#include <span>
#include <vector>

#include "relsens/marginal.hpp"

namespace relsens {

enum class KdeTransform {
  Identity,
  /// Fit in z = Phi^-1(F(x)) and map densities back with the Jacobian.
  MarginalStandardNormal,
};

/// Gaussian-kernel density estimate with Silverman's bandwidth, fitted in the
/// chosen transformed space.
class KdeModel {
 public:
  /// Needs at least 20 values; throws DegenerateSample for zero spread.
  KdeModel(std::span<const double> values, const Marginal& marginal, KdeTransform transform);

  const std::vector<double>& points() const noexcept { return points_; }
  double bandwidth() const noexcept { return bandwidth_; }
  KdeTransform transform() const noexcept { return transform_; }
  const Marginal& marginal() const noexcept { return marginal_; }

  /// Density of the transformed variable.
  double density_transformed(double t) const noexcept;
  /// Density in physical space (includes the transform Jacobian).
  double density(double x) const;
  /// Ratio of the fitted density to the prior marginal density at x,
  /// computed without forming either density where the transform allows.
  double density_ratio(double x) const;

 private:
  std::vector<double> points_;
  double bandwidth_;
  KdeTransform transform_;
  Marginal marginal_;
};

/// 1.06 min(sd, iqr / 1.34) n^(-1/5); falls back to sd when the IQR is zero.
double silverman_bandwidth(std::span<const double> values);

/// Sample quantile with linear interpolation between order statistics.
double sample_quantile(std::vector<double> values, double p);

/// Effective sample size from the initial positive sequence of
/// autocorrelations (for Markov-chain output).
double effective_sample_size(std::span<const double> chain);

}  // namespace relsens
