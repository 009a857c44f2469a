#pragma once

#include <span>
#include <string>
#include <vector>

#include "relsens/form.hpp"
#include "relsens/joint.hpp"
#include "relsens/kde.hpp"
#include "relsens/lognormal_linear.hpp"

namespace relsens {

enum class CurveSource { Analytic, Form, Kde };

std::string_view to_string(CurveSource s) noexcept;

/// Conditional failure probability pF(x_i) on a grid over input i.
struct ConditionalPfCurve {
  std::size_t input_index = 0;
  std::vector<double> grid;
  std::vector<double> pf_values;
  CurveSource source = CurveSource::Analytic;
  double pf_uncond = 0.0;

  // Filled by the sample-based estimator.
  std::vector<double> density_prior;
  std::vector<double> density_conditional;
  double clip_fraction = 0.0;
  std::size_t dropped_points = 0;
  std::size_t n_failure_samples = 0;
  double effective_sample_size = 0.0;
};

inline constexpr std::size_t kDefaultGridPoints = 512;
inline constexpr double kDefaultGridTail = 1e-6;

/// Points equally spaced in z between Phi^-1(tail) and Phi^-1(1 - tail),
/// mapped through the marginal quantile function.
std::vector<double> quantile_grid(const Marginal& marginal, std::size_t points = kDefaultGridPoints,
                                  double tail = kDefaultGridTail);

ConditionalPfCurve analytic_curve(const LognormalLinearProblem& problem, std::size_t i,
                                  std::vector<double> grid);

/// FORM curve; independent inputs only.
ConditionalPfCurve form_curve(const GaussianCopulaJoint& joint, std::size_t i, const FormResult& form,
                              std::vector<double> grid);

struct KdeCurveOptions {
  KdeTransform transform = KdeTransform::MarginalStandardNormal;
  /// Samples come from Markov chains; report an effective sample size.
  bool correlated = false;
};

/// pF(x_i) = f(x_i | F) / f(x_i) * pF, with the failure-conditional density
/// from a KDE of the failure samples. Values are clipped to [0, 1]; grid points
/// where the prior density underflows are dropped.
ConditionalPfCurve conditional_pf_from_failure_samples(const GaussianCopulaJoint& joint, std::size_t i,
                                                       std::span<const double> failure_values,
                                                       double pf_hat, std::vector<double> grid,
                                                       const KdeCurveOptions& options = {});

/// Integral of pF(x_i) f(x_i) over the grid (trapezoid in z); recovers pF up
/// to truncation and estimator error.
double total_probability(const ConditionalPfCurve& curve, const Marginal& marginal);

}  // namespace relsens
