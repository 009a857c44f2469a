#pragma once

#include <vector>

#include "relsens/joint.hpp"

namespace relsens {

/// g = const_term + sum_i coeffs[i] * ln X_i with ln X jointly Gaussian.
/// Failure {g <= 0} then has a closed-form probability.
struct LognormalLinearProblem {
  double const_term = 0.0;
  std::vector<double> coeffs;
  Vector mu_ln;
  Matrix c_ln;

  /// Builds mu_ln and c_ln from lognormal marginals joined by a Gaussian copula
  /// (the copula correlation of ln X is exactly r_z).
  static LognormalLinearProblem from_joint(const GaussianCopulaJoint& joint,
                                           std::vector<double> coeffs, double const_term);

  std::size_t dims() const noexcept { return coeffs.size(); }
  void validate() const;
};

double lognormal_linear_pf(const LognormalLinearProblem& problem);

/// pF given X_i = x_i: ln X_{-i} conditioned on ln x_i by Gaussian regression.
double lognormal_linear_conditional_pf(const LognormalLinearProblem& problem, std::size_t i,
                                       double x_i);

/// Reliability index of the linear form, beta = mean(g) / sd(g).
double lognormal_linear_beta(const LognormalLinearProblem& problem);

}  // namespace relsens
