#include "relsens/joint.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <string>

#include "relsens/error.hpp"
#include "relsens/special.hpp"

namespace relsens {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kRhoBracket = 0.999;

std::string entry_name(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

Matrix cholesky_or_throw(const Matrix& m, ErrorKind kind, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(kind, std::string(what) + " is not positive definite");
  }
  return llt.matrixL();
}

Matrix nearest_correlation(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  Vector ev = solver.eigenvalues().cwiseMax(1e-10);
  Matrix repaired = solver.eigenvectors() * ev.asDiagonal() * solver.eigenvectors().transpose();
  const Vector d = repaired.diagonal().cwiseSqrt().cwiseInverse();
  repaired = d.asDiagonal() * repaired * d.asDiagonal();
  repaired.diagonal().setOnes();
  return 0.5 * (repaired + repaired.transpose());
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(Matrix entries) : entries_(std::move(entries)) {
  const auto n = entries_.rows();
  if (n == 0 || entries_.cols() != n) {
    throw Error(ErrorKind::InvalidCorrelation, "correlation matrix must be square and nonempty");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(entries_(i, i)) || std::fabs(entries_(i, i) - 1.0) > kSymmetryTol) {
      throw Error(ErrorKind::InvalidCorrelation,
                  "diagonal entry " + entry_name(i, i) + " is " + std::to_string(entries_(i, i)) +
                      ", expected 1");
    }
    for (Eigen::Index j = 0; j < i; ++j) {
      const double a = entries_(i, j);
      const double b = entries_(j, i);
      if (!std::isfinite(a) || std::fabs(a - b) > kSymmetryTol) {
        throw Error(ErrorKind::InvalidCorrelation,
                    "matrix is not symmetric at " + entry_name(i, j));
      }
      if (std::fabs(a) >= 1.0) {
        throw Error(ErrorKind::InvalidCorrelation,
                    "off-diagonal entry " + entry_name(i, j) + " = " + std::to_string(a) +
                        " must lie strictly inside (-1, 1)");
      }
    }
  }
  entries_.diagonal().setOnes();
  chol_ = cholesky_or_throw(entries_, ErrorKind::InvalidCorrelation, "correlation matrix");
}

CorrelationMatrix CorrelationMatrix::identity(std::size_t n) {
  return CorrelationMatrix(Matrix::Identity(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n)));
}

bool CorrelationMatrix::is_identity() const noexcept {
  return entries_.isIdentity(0.0);
}

double nataf_implied_correlation(const Marginal& a, const Marginal& b, double rho_z,
                                 std::size_t hermite_points) {
  const auto& rule = gauss_hermite_rule(hermite_points);
  const double mean_a = a.mean();
  const double mean_b = b.mean();
  const double root = std::sqrt(std::max(0.0, 1.0 - rho_z * rho_z));
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double z1 = rule.nodes[i];
    const double da = a.from_standard(z1) - mean_a;
    double inner = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double z2 = rho_z * z1 + root * rule.nodes[j];
      inner += rule.weights[j] * (b.from_standard(z2) - mean_b);
    }
    acc += rule.weights[i] * da * inner;
  }
  return acc / (a.stddev() * b.stddev());
}

double nataf_pair(const Marginal& a, const Marginal& b, double rho_x,
                  std::size_t hermite_points) {
  if (rho_x == 0.0) return 0.0;
  if (a.kind() == Distribution::Normal && b.kind() == Distribution::Normal) return rho_x;
  if (a.kind() == Distribution::Lognormal && b.kind() == Distribution::Lognormal) {
    const double sa = a.params()[1];
    const double sb = b.params()[1];
    const double arg = 1.0 + rho_x * a.cov() * b.cov();
    if (!(arg > 0.0)) {
      throw Error(ErrorKind::NatafInfeasible,
                  "lognormal pair cannot attain correlation " + std::to_string(rho_x));
    }
    const double rho_z = std::log(arg) / (sa * sb);
    if (std::fabs(rho_z) >= 1.0) {
      throw Error(ErrorKind::NatafInfeasible,
                  "lognormal pair cannot attain correlation " + std::to_string(rho_x));
    }
    return rho_z;
  }

  auto residual = [&](double r) { return nataf_implied_correlation(a, b, r, hermite_points) - rho_x; };
  const double f_lo = residual(-kRhoBracket);
  const double f_hi = residual(kRhoBracket);
  if (f_lo > 0.0 || f_hi < 0.0) {
    throw Error(ErrorKind::NatafInfeasible,
                "target correlation " + std::to_string(rho_x) +
                    " is not attainable for this marginal pair");
  }
  boost::uintmax_t max_iter = 100;
  auto tol = boost::math::tools::eps_tolerance<double>(40);
  const auto [lo, hi] =
      boost::math::tools::toms748_solve(residual, -kRhoBracket, kRhoBracket, f_lo, f_hi, tol, max_iter);
  return 0.5 * (lo + hi);
}

CorrelationMatrix nataf_fit(std::span<const Marginal> marginals, const CorrelationMatrix& r_xx,
                            const NatafOptions& options) {
  const std::size_t n = marginals.size();
  if (r_xx.size() != n) {
    throw Error(ErrorKind::InvalidArgument,
                "correlation matrix size " + std::to_string(r_xx.size()) +
                    " does not match " + std::to_string(n) + " marginals");
  }
  Matrix rz = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double r = nataf_pair(marginals[i], marginals[j], r_xx(i, j), options.hermite_points);
      rz(i, j) = rz(j, i) = r;
    }
  }
  Eigen::LLT<Matrix> llt(rz);
  if (llt.info() != Eigen::Success) {
    if (!options.repair_nearest_pd) {
      throw Error(ErrorKind::NatafInfeasible,
                  "fitted copula correlation is not positive definite "
                  "(enable nearest-PD repair to proceed)");
    }
    rz = nearest_correlation(rz);
  }
  return CorrelationMatrix(std::move(rz));
}

GaussianCopulaJoint::GaussianCopulaJoint(std::vector<Marginal> marginals,
                                         const CorrelationMatrix& r_xx,
                                         const NatafOptions& options)
    : marginals_(std::move(marginals)),
      r_xx_(r_xx),
      r_z_(nataf_fit(marginals_, r_xx, options)),
      independent_(r_xx.is_identity()) {}

GaussianCopulaJoint GaussianCopulaJoint::independent(std::vector<Marginal> marginals) {
  const std::size_t n = marginals.size();
  return GaussianCopulaJoint(std::move(marginals), CorrelationMatrix::identity(n));
}

Vector GaussianCopulaJoint::to_standard(const Vector& x, TransformDiagnostics* diag) const {
  if (static_cast<std::size_t>(x.size()) != dims()) {
    throw Error(ErrorKind::InvalidArgument, "to_standard: dimension mismatch");
  }
  Vector z(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    try {
      z(i) = marginals_[static_cast<std::size_t>(i)].to_standard(x(i), diag);
    } catch (const Error& e) {
      throw Error(e.kind(), "component " + std::to_string(i) + ": " + e.detail());
    }
  }
  if (independent_) return z;
  return chol_z().triangularView<Eigen::Lower>().solve(z);
}

Vector GaussianCopulaJoint::to_correlated(const Vector& u) const {
  if (static_cast<std::size_t>(u.size()) != dims()) {
    throw Error(ErrorKind::InvalidArgument, "to_physical: dimension mismatch");
  }
  if (independent_) return u;
  return chol_z().triangularView<Eigen::Lower>() * u;
}

Vector GaussianCopulaJoint::correlated_to_physical(const Vector& z) const {
  Vector x(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    x(i) = marginals_[static_cast<std::size_t>(i)].from_standard(z(i));
  }
  return x;
}

Vector GaussianCopulaJoint::to_physical(const Vector& u) const {
  return correlated_to_physical(to_correlated(u));
}

}  // namespace relsens
