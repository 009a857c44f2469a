#include "relsens/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "relsens/error.hpp"
#include "relsens/special.hpp"

namespace relsens {
namespace {

constexpr std::size_t kMinValues = 20;
// Kernels further than this many bandwidths away contribute below 1e-30.
constexpr double kKernelCutoff = 11.8;

double sample_sd(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace

double sample_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double silverman_bandwidth(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorKind::DegenerateSample, "bandwidth needs two or more values");
  const double sd = sample_sd(values);
  std::vector<double> copy(values.begin(), values.end());
  const double iqr = sample_quantile(copy, 0.75) - sample_quantile(copy, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0) || !std::isfinite(spread)) {
    throw Error(ErrorKind::DegenerateSample, "sample has zero spread");
  }
  return 1.06 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

KdeModel::KdeModel(std::span<const double> values, const Marginal& marginal, KdeTransform transform)
    : bandwidth_(0.0), transform_(transform), marginal_(marginal) {
  if (values.size() < kMinValues) {
    throw Error(ErrorKind::DegenerateSample,
                "KDE needs at least 20 values, got " + std::to_string(values.size()));
  }
  points_.reserve(values.size());
  for (double v : values) {
    points_.push_back(transform == KdeTransform::Identity ? v : marginal.to_standard(v));
  }
  bandwidth_ = silverman_bandwidth(points_);
  std::sort(points_.begin(), points_.end());
}

double KdeModel::density_transformed(double t) const noexcept {
  const double h = bandwidth_;
  const auto lo = std::lower_bound(points_.begin(), points_.end(), t - kKernelCutoff * h);
  const auto hi = std::upper_bound(lo, points_.end(), t + kKernelCutoff * h);
  double acc = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const double s = (t - *it) / h;
    acc += std::exp(-0.5 * s * s);
  }
  return acc * kInvSqrt2Pi / (h * static_cast<double>(points_.size()));
}

double KdeModel::density(double x) const {
  if (transform_ == KdeTransform::Identity) return density_transformed(x);
  if (!marginal_.in_support(x)) return 0.0;
  const double z = marginal_.to_standard(x);
  return density_transformed(z) * marginal_.standard_jacobian(x);
}

double KdeModel::density_ratio(double x) const {
  if (transform_ == KdeTransform::Identity) {
    const double prior = marginal_.pdf(x);
    return prior > 0.0 ? density_transformed(x) / prior : 0.0;
  }
  const double z = marginal_.to_standard(x);
  return density_transformed(z) / normal_pdf(z);
}

double effective_sample_size(std::span<const double> chain) {
  const std::size_t n = chain.size();
  if (n < 3) return static_cast<double>(n);
  const double mean = std::accumulate(chain.begin(), chain.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double v : chain) c0 += (v - mean) * (v - mean);
  if (!(c0 > 0.0)) return static_cast<double>(n);
  auto rho = [&](std::size_t lag) {
    double c = 0.0;
    for (std::size_t k = 0; k + lag < n; ++k) c += (chain[k] - mean) * (chain[k + lag] - mean);
    return c / c0;
  };
  double tau = 1.0;
  for (std::size_t lag = 1; lag + 1 < n; lag += 2) {
    const double pair = rho(lag) + rho(lag + 1);
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  return static_cast<double>(n) / tau;
}

}  // namespace relsens
