#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "relsens/marginal.hpp"

namespace relsens {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Symmetric, unit-diagonal, positive definite matrix. Construction validates
/// all three and throws InvalidCorrelation otherwise.
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(Matrix entries);
  static CorrelationMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const Matrix& matrix() const noexcept { return entries_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  bool is_identity() const noexcept;
  /// Lower Cholesky factor L with L L^T = matrix().
  const Matrix& cholesky() const noexcept { return chol_; }

 private:
  Matrix entries_;
  Matrix chol_;
};

struct NatafOptions {
  /// When the fitted copula correlation is not positive definite, clip its
  /// eigenvalues and rescale to unit diagonal instead of throwing.
  bool repair_nearest_pd = false;
  std::size_t hermite_points = 32;
};

/// Physical correlation implied by a Gaussian copula with latent
/// correlation rho_z between marginals a and b (tensor Gauss-Hermite).
double nataf_implied_correlation(const Marginal& a, const Marginal& b, double rho_z,
                                 std::size_t hermite_points = 32);

/// Latent correlation for one pair. Closed forms for normal-normal (identity)
/// and lognormal-lognormal; otherwise a bracketed root-find on [-0.999, 0.999].
double nataf_pair(const Marginal& a, const Marginal& b, double rho_x,
                  std::size_t hermite_points = 32);

/// Fit the copula correlation r_z reproducing r_xx entrywise.
/// Throws NatafInfeasible if the result is not positive definite and repair
/// is not enabled.
CorrelationMatrix nataf_fit(std::span<const Marginal> marginals, const CorrelationMatrix& r_xx,
                            const NatafOptions& options = {});

/// Marginals joined by a Gaussian copula (Nataf model). Immutable.
class GaussianCopulaJoint {
 public:
  GaussianCopulaJoint(std::vector<Marginal> marginals, const CorrelationMatrix& r_xx,
                      const NatafOptions& options = {});
  static GaussianCopulaJoint independent(std::vector<Marginal> marginals);

  std::size_t dims() const noexcept { return marginals_.size(); }
  const std::vector<Marginal>& marginals() const noexcept { return marginals_; }
  const Marginal& marginal(std::size_t i) const { return marginals_.at(i); }
  const CorrelationMatrix& r_xx() const noexcept { return r_xx_; }
  const CorrelationMatrix& r_z() const noexcept { return r_z_; }
  const Matrix& chol_z() const noexcept { return r_z_.cholesky(); }
  bool is_independent() const noexcept { return independent_; }

  /// x -> u: z_i = Phi^-1(F_i(x_i)), u = L^-1 z.
  Vector to_standard(const Vector& x, TransformDiagnostics* diag = nullptr) const;
  /// u -> x.
  Vector to_physical(const Vector& u) const;
  /// u -> z = L u (correlated standard normal).
  Vector to_correlated(const Vector& u) const;
  /// Componentwise marginal transform z -> x.
  Vector correlated_to_physical(const Vector& z) const;

 private:
  std::vector<Marginal> marginals_;
  CorrelationMatrix r_xx_;
  CorrelationMatrix r_z_;
  bool independent_;
};

}  // namespace relsens
