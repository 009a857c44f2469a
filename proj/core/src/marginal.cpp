#include "relsens/marginal.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "relsens/error.hpp"
#include "relsens/special.hpp"

namespace relsens {
namespace {

constexpr double kClampProbability = 1e-300;

[[noreturn]] void bad_parameter(const char* what, double value) {
  throw Error(ErrorKind::InvalidArgument,
              std::string(what) + " must be strictly positive and finite, got " +
                  std::to_string(value));
}

void require_positive(const char* what, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) bad_parameter(what, value);
}

// Squared c.o.v. of a Weibull with shape k; independent of the scale.
double weibull_cov2(double k) {
  const double l1 = std::lgamma(1.0 + 1.0 / k);
  const double l2 = std::lgamma(1.0 + 2.0 / k);
  return std::expm1(l2 - 2.0 * l1);
}

double weibull_shape_from_cov(double cov) {
  const double target = cov * cov;
  auto residual = [target](double k) { return weibull_cov2(k) - target; };
  // cov(k) is strictly decreasing; bracket by expansion.
  double lo = 1.0;
  double hi = 1.0;
  while (residual(lo) < 0.0 && lo > 1e-3) lo *= 0.5;
  while (residual(hi) > 0.0 && hi < 1e6) hi *= 2.0;
  const double r_lo = residual(lo);
  const double r_hi = residual(hi);
  if (r_lo < 0.0 || r_hi > 0.0) {
    throw Error(ErrorKind::FitFailure,
                "Weibull shape: c.o.v. " + std::to_string(cov) +
                    " is outside the bracket [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "], residuals " + std::to_string(r_lo) + ", " +
                    std::to_string(r_hi));
  }
  boost::uintmax_t max_iter = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto [a, b] = boost::math::tools::toms748_solve(residual, lo, hi, r_lo, r_hi, tol, max_iter);
  const double k = 0.5 * (a + b);
  const double res = residual(k);
  if (max_iter >= 200 || std::fabs(res) > 1e-12 * target) {
    throw Error(ErrorKind::FitFailure,
                "Weibull shape root-find did not converge, residual " + std::to_string(res));
  }
  return k;
}

}  // namespace

std::string_view to_string(Distribution kind) noexcept {
  switch (kind) {
    case Distribution::Normal: return "normal";
    case Distribution::Lognormal: return "lognormal";
    case Distribution::Gumbel: return "gumbel";
    case Distribution::Weibull: return "weibull";
  }
  return "unknown";
}

Distribution distribution_from_string(std::string_view name) {
  if (name == "normal") return Distribution::Normal;
  if (name == "lognormal") return Distribution::Lognormal;
  if (name == "gumbel") return Distribution::Gumbel;
  if (name == "weibull") return Distribution::Weibull;
  throw Error(ErrorKind::Configuration, "unknown distribution '" + std::string(name) + "'");
}

Marginal Marginal::normal(double mean, double sd) {
  if (!std::isfinite(mean)) bad_parameter("normal mean", mean);
  require_positive("normal standard deviation", sd);
  return {Distribution::Normal, mean, sd};
}

Marginal Marginal::lognormal(double mu_ln, double sigma_ln) {
  if (!std::isfinite(mu_ln)) bad_parameter("lognormal mu_ln", mu_ln);
  require_positive("lognormal sigma_ln", sigma_ln);
  return {Distribution::Lognormal, mu_ln, sigma_ln};
}

Marginal Marginal::gumbel(double location, double scale) {
  if (!std::isfinite(location)) bad_parameter("gumbel location", location);
  require_positive("gumbel scale", scale);
  return {Distribution::Gumbel, location, scale};
}

Marginal Marginal::weibull(double shape, double scale) {
  require_positive("weibull shape", shape);
  require_positive("weibull scale", scale);
  return {Distribution::Weibull, shape, scale};
}

Marginal Marginal::from_moments(Distribution kind, double mean, double cov) {
  require_positive("coefficient of variation", cov);
  switch (kind) {
    case Distribution::Normal:
      if (mean == 0.0 || !std::isfinite(mean)) {
        throw Error(ErrorKind::InvalidArgument,
                    "normal from mean/c.o.v. needs a nonzero mean");
      }
      return normal(mean, cov * std::fabs(mean));
    case Distribution::Lognormal: {
      require_positive("lognormal mean", mean);
      const double s2 = std::log1p(cov * cov);
      return lognormal(std::log(mean) - 0.5 * s2, std::sqrt(s2));
    }
    case Distribution::Gumbel: {
      require_positive("gumbel mean", mean);
      const double scale = cov * mean * std::sqrt(6.0) / kPi;
      return gumbel(mean - kEulerGamma * scale, scale);
    }
    case Distribution::Weibull: {
      require_positive("weibull mean", mean);
      const double k = weibull_shape_from_cov(cov);
      return weibull(k, mean / std::exp(std::lgamma(1.0 + 1.0 / k)));
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown distribution kind");
}

double Marginal::mean() const noexcept {
  const auto [p0, p1] = params_;
  switch (kind_) {
    case Distribution::Normal: return p0;
    case Distribution::Lognormal: return std::exp(p0 + 0.5 * p1 * p1);
    case Distribution::Gumbel: return p0 + kEulerGamma * p1;
    case Distribution::Weibull: return p1 * std::exp(std::lgamma(1.0 + 1.0 / p0));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Marginal::stddev() const noexcept {
  const auto [p0, p1] = params_;
  switch (kind_) {
    case Distribution::Normal: return p1;
    case Distribution::Lognormal: return mean() * std::sqrt(std::expm1(p1 * p1));
    case Distribution::Gumbel: return kPi * p1 / std::sqrt(6.0);
    case Distribution::Weibull: return mean() * std::sqrt(weibull_cov2(p0));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Marginal::cov() const noexcept { return stddev() / std::fabs(mean()); }

bool Marginal::in_support(double x) const noexcept {
  if (std::isnan(x)) return false;
  switch (kind_) {
    case Distribution::Normal:
    case Distribution::Gumbel: return std::isfinite(x);
    case Distribution::Lognormal: return x > 0.0 && std::isfinite(x);
    case Distribution::Weibull: return x >= 0.0 && std::isfinite(x);
  }
  return false;
}

double Marginal::support_lower() const noexcept {
  switch (kind_) {
    case Distribution::Lognormal:
    case Distribution::Weibull: return 0.0;
    default: return -std::numeric_limits<double>::infinity();
  }
}

double Marginal::pdf(double x) const noexcept {
  if (!in_support(x)) return 0.0;
  return std::exp(log_pdf(x));
}

double Marginal::log_pdf(double x) const noexcept {
  const auto [p0, p1] = params_;
  if (!in_support(x)) return -std::numeric_limits<double>::infinity();
  switch (kind_) {
    case Distribution::Normal: {
      const double t = (x - p0) / p1;
      return -0.5 * t * t - std::log(p1) + std::log(kInvSqrt2Pi);
    }
    case Distribution::Lognormal: {
      const double t = (std::log(x) - p0) / p1;
      return -0.5 * t * t - std::log(p1 * x) + std::log(kInvSqrt2Pi);
    }
    case Distribution::Gumbel: {
      const double y = (x - p0) / p1;
      return -(y + std::exp(-y)) - std::log(p1);
    }
    case Distribution::Weibull: {
      if (x == 0.0) {
        if (p0 < 1.0) return std::numeric_limits<double>::infinity();
        if (p0 > 1.0) return -std::numeric_limits<double>::infinity();
        return -std::log(p1);
      }
      const double t = x / p1;
      return std::log(p0 / p1) + (p0 - 1.0) * std::log(t) - std::pow(t, p0);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Marginal::cdf(double x) const noexcept {
  const auto [p0, p1] = params_;
  switch (kind_) {
    case Distribution::Normal: return normal_cdf((x - p0) / p1);
    case Distribution::Lognormal:
      return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - p0) / p1);
    case Distribution::Gumbel: return std::exp(-std::exp(-(x - p0) / p1));
    case Distribution::Weibull:
      return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / p1, p0));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Marginal::sf(double x) const noexcept {
  const auto [p0, p1] = params_;
  switch (kind_) {
    case Distribution::Normal: return normal_sf((x - p0) / p1);
    case Distribution::Lognormal:
      return x <= 0.0 ? 1.0 : normal_sf((std::log(x) - p0) / p1);
    case Distribution::Gumbel: return -std::expm1(-std::exp(-(x - p0) / p1));
    case Distribution::Weibull: return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / p1, p0));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Marginal::inv_cdf(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::OutOfDomain,
                "inverse CDF needs 0 < p < 1, got " + std::to_string(p));
  }
  const auto [p0, p1] = params_;
  switch (kind_) {
    case Distribution::Normal: return p0 + p1 * normal_inv_cdf(p);
    case Distribution::Lognormal: return std::exp(p0 + p1 * normal_inv_cdf(p));
    case Distribution::Gumbel: return p0 - p1 * std::log(-std::log(p));
    case Distribution::Weibull: return p1 * std::pow(-std::log1p(-p), 1.0 / p0);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Marginal::inv_sf(double q) const {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorKind::OutOfDomain,
                "inverse survival function needs 0 < q < 1, got " + std::to_string(q));
  }
  const auto [p0, p1] = params_;
  switch (kind_) {
    case Distribution::Normal: return p0 + p1 * normal_inv_sf(q);
    case Distribution::Lognormal: return std::exp(p0 + p1 * normal_inv_sf(q));
    case Distribution::Gumbel: return p0 - p1 * std::log(-std::log1p(-q));
    case Distribution::Weibull: return p1 * std::pow(-std::log(q), 1.0 / p0);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Marginal::to_standard(double x, TransformDiagnostics* diag) const {
  if (!in_support(x)) {
    throw Error(ErrorKind::DomainError,
                "value " + std::to_string(x) + " lies outside the support of the " +
                    std::string(to_string(kind_)) + " marginal");
  }
  const auto [p0, p1] = params_;
  if (kind_ == Distribution::Normal) return (x - p0) / p1;
  if (kind_ == Distribution::Lognormal) return (std::log(x) - p0) / p1;

  const auto clamp = [diag](double prob) {
    if (prob < kClampProbability) {
      if (diag != nullptr) ++diag->clamped;
      return kClampProbability;
    }
    return prob;
  };
  const double p = cdf(x);
  if (p <= 0.5) return normal_inv_cdf(clamp(p));
  return normal_inv_sf(clamp(sf(x)));
}

double Marginal::from_standard(double z) const {
  const auto [p0, p1] = params_;
  if (kind_ == Distribution::Normal) return p0 + p1 * z;
  if (kind_ == Distribution::Lognormal) return std::exp(p0 + p1 * z);
  if (z <= 0.0) return inv_cdf(std::max(normal_cdf(z), kClampProbability));
  return inv_sf(std::max(normal_sf(z), kClampProbability));
}

double Marginal::standard_jacobian(double x) const {
  const double z = to_standard(x);
  return std::exp(log_pdf(x) + 0.5 * z * z) / kInvSqrt2Pi;
}

}  // namespace relsens
