#include "relsens/conditional_pf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "relsens/error.hpp"
#include "relsens/special.hpp"

namespace relsens {

std::string_view to_string(CurveSource s) noexcept {
  switch (s) {
    case CurveSource::Analytic: return "analytic";
    case CurveSource::Form: return "form";
    case CurveSource::Kde: return "kde";
  }
  return "unknown";
}

std::vector<double> quantile_grid(const Marginal& marginal, std::size_t points, double tail) {
  if (points < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least two points");
  if (!(tail > 0.0 && tail < 0.5)) throw Error(ErrorKind::InvalidArgument, "grid tail must lie in (0, 0.5)");
  const double z_hi = normal_inv_sf(tail);
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double z = -z_hi + 2.0 * z_hi * static_cast<double>(k) / static_cast<double>(points - 1);
    grid[k] = marginal.from_standard(z);
  }
  return grid;
}

ConditionalPfCurve analytic_curve(const LognormalLinearProblem& problem, std::size_t i,
                                  std::vector<double> grid) {
  ConditionalPfCurve c;
  c.input_index = i;
  c.source = CurveSource::Analytic;
  c.pf_uncond = lognormal_linear_pf(problem);
  c.pf_values.reserve(grid.size());
  for (double x : grid) c.pf_values.push_back(lognormal_linear_conditional_pf(problem, i, x));
  c.grid = std::move(grid);
  return c;
}

ConditionalPfCurve form_curve(const GaussianCopulaJoint& joint, std::size_t i, const FormResult& form,
                              std::vector<double> grid) {
  ConditionalPfCurve c;
  c.input_index = i;
  c.source = CurveSource::Form;
  c.pf_uncond = normal_cdf(-form.beta0);
  c.pf_values.reserve(grid.size());
  for (double x : grid) c.pf_values.push_back(conditional_pf_x(joint, i, x, form));
  c.grid = std::move(grid);
  return c;
}

ConditionalPfCurve conditional_pf_from_failure_samples(const GaussianCopulaJoint& joint, std::size_t i,
                                                       std::span<const double> failure_values,
                                                       double pf_hat, std::vector<double> grid,
                                                       const KdeCurveOptions& options) {
  if (!(pf_hat > 0.0 && pf_hat < 1.0)) {
    throw Error(ErrorKind::DegenerateSample,
                "sample-based conditional pF needs 0 < pF < 1, got " + std::to_string(pf_hat));
  }
  if (i >= joint.dims()) throw Error(ErrorKind::InvalidArgument, "input index out of range");
  const Marginal& m = joint.marginal(i);
  const KdeModel kde(failure_values, m, options.transform);

  ConditionalPfCurve c;
  c.input_index = i;
  c.source = CurveSource::Kde;
  c.pf_uncond = pf_hat;
  c.n_failure_samples = failure_values.size();
  c.effective_sample_size = options.correlated ? effective_sample_size(failure_values)
                                               : static_cast<double>(failure_values.size());
  std::size_t clipped = 0;
  for (double x : grid) {
    const double prior = m.pdf(x);
    if (!(prior > 0.0) || !std::isfinite(prior)) {
      ++c.dropped_points;
      continue;
    }
    double pf = kde.density_ratio(x) * pf_hat;
    if (pf > 1.0) {
      pf = 1.0;
      ++clipped;
    }
    c.grid.push_back(x);
    c.pf_values.push_back(pf);
    c.density_prior.push_back(prior);
    c.density_conditional.push_back(kde.density(x));
  }
  if (c.grid.size() < 2) {
    throw Error(ErrorKind::DegenerateSample, "too few grid points with positive prior density");
  }
  c.clip_fraction = static_cast<double>(clipped) / static_cast<double>(c.grid.size());
  return c;
}

double total_probability(const ConditionalPfCurve& curve, const Marginal& marginal) {
  double acc = 0.0;
  for (std::size_t k = 1; k < curve.grid.size(); ++k) {
    const double z0 = marginal.to_standard(curve.grid[k - 1]);
    const double z1 = marginal.to_standard(curve.grid[k]);
    acc += 0.5 * (z1 - z0) *
           (curve.pf_values[k - 1] * normal_pdf(z0) + curve.pf_values[k] * normal_pdf(z1));
  }
  return acc;
}

}  // namespace relsens
