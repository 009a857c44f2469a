#include "relsens/lognormal_linear.hpp"

#include <cmath>
#include <string>

#include "relsens/error.hpp"
#include "relsens/special.hpp"

namespace relsens {
namespace {

Vector sign_vector(const std::vector<double>& coeffs) {
  return Eigen::Map<const Vector>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
}

}  // namespace

LognormalLinearProblem LognormalLinearProblem::from_joint(const GaussianCopulaJoint& joint,
                                                          std::vector<double> coeffs,
                                                          double const_term) {
  const auto n = static_cast<Eigen::Index>(joint.dims());
  LognormalLinearProblem p;
  p.const_term = const_term;
  p.coeffs = std::move(coeffs);
  p.mu_ln.resize(n);
  Vector sigma(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Marginal& m = joint.marginal(static_cast<std::size_t>(i));
    if (m.kind() != Distribution::Lognormal) {
      throw Error(ErrorKind::Unsupported,
                  "lognormal-linear model needs lognormal marginals; input " + std::to_string(i) +
                      " is " + std::string(to_string(m.kind())));
    }
    p.mu_ln(i) = m.params()[0];
    sigma(i) = m.params()[1];
  }
  p.c_ln = sigma.asDiagonal() * joint.r_z().matrix() * sigma.asDiagonal();
  p.validate();
  return p;
}

void LognormalLinearProblem::validate() const {
  const auto n = static_cast<Eigen::Index>(coeffs.size());
  if (mu_ln.size() != n || c_ln.rows() != n || c_ln.cols() != n) {
    throw Error(ErrorKind::InvalidArgument, "lognormal-linear problem: inconsistent dimensions");
  }
  if (!c_ln.isApprox(c_ln.transpose(), 1e-12)) {
    throw Error(ErrorKind::InvalidArgument, "lognormal-linear problem: c_ln is not symmetric");
  }
}

double lognormal_linear_beta(const LognormalLinearProblem& problem) {
  problem.validate();
  const Vector c = sign_vector(problem.coeffs);
  const double var = c.dot(problem.c_ln * c);
  const double mean = problem.const_term + c.dot(problem.mu_ln);
  if (!(var > 0.0)) {
    throw Error(ErrorKind::DegenerateProblem, "lognormal-linear problem has zero variance");
  }
  return mean / std::sqrt(var);
}

double lognormal_linear_pf(const LognormalLinearProblem& problem) {
  return normal_cdf(-lognormal_linear_beta(problem));
}

double lognormal_linear_conditional_pf(const LognormalLinearProblem& problem, std::size_t i,
                                       double x_i) {
  problem.validate();
  const auto n = static_cast<Eigen::Index>(problem.dims());
  const auto k = static_cast<Eigen::Index>(i);
  if (k >= n) throw Error(ErrorKind::InvalidArgument, "input index out of range");
  if (!(x_i > 0.0)) {
    throw Error(ErrorKind::DomainError,
                "conditioning value " + std::to_string(x_i) + " for input " + std::to_string(i) +
                    " must be positive");
  }
  const Vector c = sign_vector(problem.coeffs);
  const Matrix& C = problem.c_ln;
  const double y = std::log(x_i);
  const double var_i = C(k, k);
  if (!(var_i > 0.0)) {
    throw Error(ErrorKind::DegenerateProblem, "conditioning input has zero variance");
  }
  // E[g | y] and Var[g | y] for g = const + c' lnX, lnX ~ N(mu, C).
  const double cov_gi = c.dot(C.col(k));
  const double var_g = c.dot(C * c);
  const double mean = problem.const_term + c.dot(problem.mu_ln) +
                      cov_gi / var_i * (y - problem.mu_ln(k));
  const double var = var_g - cov_gi * cov_gi / var_i;
  if (var <= 1e-14 * var_g) {
    // g is a deterministic function of X_i
    return mean <= 0.0 ? 1.0 : 0.0;
  }
  return normal_cdf(-mean / std::sqrt(var));
}

}  // namespace relsens
