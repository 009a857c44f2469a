#include "relsens/form.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "relsens/error.hpp"
#include "relsens/special.hpp"

namespace relsens {
namespace {

constexpr double kArmijo = 1e-4;
constexpr std::size_t kMaxBacktracks = 40;
constexpr double kStartPerturbation = 1e-3;

struct Counted {
  const StandardLsf& g;
  std::size_t calls = 0;
  double operator()(const Vector& u) {
    ++calls;
    const double v = g(u);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::Evaluation, "limit state is not finite during the design-point search");
    }
    return v;
  }
};

Vector fd_gradient(Counted& g, const Vector& u, double h) {
  Vector grad(u.size());
  Vector probe = u;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    probe(i) = u(i) + h;
    const double up = g(probe);
    probe(i) = u(i) - h;
    const double down = g(probe);
    probe(i) = u(i);
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

// Conditional pF with the step-function limit at |alpha| = 1.
double conditional_pf_any(double beta0, double alpha, double u) {
  if (std::fabs(alpha) < 1.0) return conditional_pf_u(beta0, alpha, u);
  return alpha * u - beta0 >= 0.0 ? 1.0 : 0.0;
}

}  // namespace

FormResult find_design_point(const StandardLsf& g_raw, std::size_t dims,
                             const FormOptions& options, const StandardGradient& gradient) {
  if (dims == 0) throw Error(ErrorKind::InvalidArgument, "FORM needs at least one dimension");
  if (!(options.fd_step > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "finite-difference step must be positive");
  }
  Counted g{g_raw};
  auto grad_at = [&](const Vector& u) {
    return gradient ? gradient(u) : fd_gradient(g, u, options.fd_step);
  };

  const auto n = static_cast<Eigen::Index>(dims);
  Vector u = Vector::Zero(n);
  double gu = g(u);
  FormResult res;
  res.g_at_origin = gu;
  const double g_tol = options.g_tolerance * (1.0 + std::fabs(gu));

  Vector grad = grad_at(u);
  if (grad.norm() == 0.0) {
    u.setConstant(kStartPerturbation);
    gu = g(u);
    grad = grad_at(u);
  }

  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    const double gnorm2 = grad.squaredNorm();
    if (!(gnorm2 > 0.0) || !std::isfinite(gnorm2)) {
      throw Error(ErrorKind::SingularPoint,
                  "limit-state gradient vanishes at iteration " + std::to_string(it));
    }
    const double gnorm = std::sqrt(gnorm2);
    const Vector target = ((grad.dot(u) - gu) / gnorm2) * grad;
    const Vector d = target - u;

    // Penalty large enough to make d a descent direction of the merit function.
    const double c = 2.0 * std::max(u.norm(), target.norm()) / gnorm + 1e-3;
    const double merit = 0.5 * u.squaredNorm() + c * std::fabs(gu);
    const double slope = u.dot(d) - c * std::fabs(gu);

    double step = 1.0;
    Vector trial = u + d;
    double g_trial = g(trial);
    for (std::size_t k = 0; k < kMaxBacktracks && slope < 0.0; ++k) {
      const double m_trial = 0.5 * trial.squaredNorm() + c * std::fabs(g_trial);
      if (m_trial <= merit + kArmijo * step * slope) break;
      step *= 0.5;
      trial = u + step * d;
      g_trial = g(trial);
    }

    const double moved = (trial - u).norm();
    u = trial;
    gu = g_trial;
    grad = grad_at(u);
    res.iterations = it;
    if (moved <= options.step_tolerance && std::fabs(gu) <= g_tol) {
      res.converged = true;
      break;
    }
  }

  const double gnorm = grad.norm();
  if (!(gnorm > 0.0)) {
    throw Error(ErrorKind::SingularPoint, "limit-state gradient vanishes at the design point");
  }
  res.alpha = -grad / gnorm;
  res.u_star = u;
  res.grad_norm = gnorm;
  res.beta0 = res.alpha.dot(u);
  res.g_evaluations = g.calls;
  return res;
}

FormResult run_form(const GaussianCopulaJoint& joint, const LimitState& lsf,
                    std::optional<double> a, const FormOptions& options) {
  if (lsf.dims() != joint.dims()) {
    throw Error(ErrorKind::InvalidArgument, "limit state and joint model differ in dimension");
  }
  if (lsf.has_design_param() != a.has_value()) {
    throw Error(ErrorKind::DesignParameter,
                a ? "limit state has no design parameter" : "design parameter value required");
  }
  const double av = a.value_or(0.0);
  StandardLsf g = [&](const Vector& u) {
    const Vector x = joint.to_physical(u);
    return lsf(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), av);
  };
  FormResult res = find_design_point(g, joint.dims(), options);
  res.x_star = joint.to_physical(res.u_star);
  if (joint.is_independent()) {
    res.alpha_z = res.alpha;
  } else {
    // grad_z g = L^-T grad_u G, and alpha is proportional to -grad_u G.
    Vector w = joint.chol_z().transpose().triangularView<Eigen::Upper>().solve(res.alpha);
    res.alpha_z = w / w.norm();
  }
  return res;
}

double conditional_pf_u(double beta0, double alpha_i, double u_i) {
  if (!(std::fabs(alpha_i) < 1.0)) {
    throw Error(ErrorKind::DegenerateProblem,
                "conditional pF is a step function for |alpha| = 1");
  }
  return normal_cdf((alpha_i * u_i - beta0) / std::sqrt(1.0 - alpha_i * alpha_i));
}

double conditional_pf_x(const GaussianCopulaJoint& joint, std::size_t i, double x_i,
                        const FormResult& form) {
  if (!joint.is_independent()) {
    throw Error(ErrorKind::Unsupported,
                "FORM conditional pF in physical space needs independent inputs; "
                "use the sampling estimator for dependent inputs");
  }
  if (i >= joint.dims()) throw Error(ErrorKind::InvalidArgument, "input index out of range");
  const double u = joint.marginal(i).to_standard(x_i);
  return conditional_pf_u(form.beta0, form.alpha(static_cast<Eigen::Index>(i)), u);
}

double threshold_u(double beta0, double alpha_i, double cr_over_cf) {
  if (alpha_i == 0.0) {
    throw Error(ErrorKind::NoThreshold, "alpha = 0: the input never changes the decision");
  }
  if (!(cr_over_cf > 0.0 && cr_over_cf < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "cost ratio must lie in (0, 1)");
  }
  const double s = std::sqrt(std::max(0.0, 1.0 - alpha_i * alpha_i));
  return (s * normal_inv_cdf(cr_over_cf) + beta0) / alpha_i;
}

double threshold_x(const GaussianCopulaJoint& joint, std::size_t i, double beta0, double alpha_i,
                   double cr_over_cf) {
  if (i >= joint.dims()) throw Error(ErrorKind::InvalidArgument, "input index out of range");
  return joint.marginal(i).from_standard(threshold_u(beta0, alpha_i, cr_over_cf));
}

double evppi_form_safety(double beta0, double alpha_i, double c_f, double c_r,
                         FormEvppiMethod method) {
  if (!(c_f > c_r && c_r > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "need c_f > c_r > 0");
  }
  if (std::fabs(alpha_i) > 1.0) {
    throw Error(ErrorKind::InvalidArgument, "|alpha| must not exceed 1");
  }
  if (alpha_i == 0.0) return 0.0;
  const double ratio = c_r / c_f;
  const double pf = normal_cdf(-beta0);
  const double ut = threshold_u(beta0, alpha_i, ratio);

  if (method == FormEvppiMethod::Closed) {
    const double sgn = (pf - ratio) * alpha_i;
    const double s = sgn > 0.0 ? 1.0 : -1.0;
    const double v = c_f * bivariate_normal_cdf(-beta0, s * ut, -s * alpha_i) - c_r * normal_cdf(s * ut);
    return std::fabs(v);
  }

  const bool prior_replace = pf > ratio;
  auto integrand = [&](double u) {
    const double p = conditional_pf_any(beta0, alpha_i, u);
    if ((p > ratio) == prior_replace) return 0.0;
    return std::fabs(c_f * p - c_r) * normal_pdf(u);
  };
  // The conditional pF is monotone in u, so the action differs from the prior
  // on one side of the threshold only. Integrating that side to infinity keeps
  // the relative accuracy when all of the mass sits in a far tail.
  const bool active_below = (alpha_i > 0.0) == prior_replace;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double inf = std::numeric_limits<double>::infinity();
  double err = 0.0;
  if (active_below) return GK::integrate(integrand, -inf, ut, 15, 1e-13, &err);
  return GK::integrate(integrand, ut, inf, 15, 1e-13, &err);
}

double evppi_form_design(double beta0, double alpha_i, double c_f) {
  if (!(c_f > 0.0)) throw Error(ErrorKind::InvalidArgument, "c_f must be positive");
  const double a2 = alpha_i * alpha_i;
  if (a2 > 1.0 + 1e-12) throw Error(ErrorKind::InvalidArgument, "|alpha| must not exceed 1");
  const double phi = normal_pdf(beta0);
  double v = 0.0;
  if (a2 >= 1.0) {
    // (1 - alpha^2) ln(1 - alpha^2) -> 0
    v = normal_cdf(-beta0) + beta0 * phi;
  } else {
    const double t = -std::log1p(-a2);
    const double b = std::sqrt(beta0 * beta0 + t);
    v = normal_cdf(-beta0) - normal_cdf(-b) + phi * (beta0 - b * std::exp(-0.5 * t));
  }
  return std::max(0.0, v) * c_f;
}

}  // namespace relsens
