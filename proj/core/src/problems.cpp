#include "relsens/problems.hpp"

#include <cmath>

namespace relsens {
namespace {

std::vector<Marginal> example1_marginals() {
  auto ln = [](double mean, double cov) {
    return Marginal::from_moments(Distribution::Lognormal, mean, cov);
  };
  return {ln(100.0, 0.2), ln(40.0, 0.25), ln(1.0, 0.1), ln(1.0, 0.2)};
}

}  // namespace

Matrix example1_correlation() {
  Matrix r(4, 4);
  r << 1.0, 0.0, 0.5, 0.0,
       0.0, 1.0, 0.0, 0.5,
       0.5, 0.0, 1.0, 0.5,
       0.0, 0.5, 0.5, 1.0;
  return r;
}

Problem example1(bool dependent, bool design) {
  const CorrelationMatrix r = dependent ? CorrelationMatrix(example1_correlation())
                                        : CorrelationMatrix::identity(4);
  return {{"R", "S", "XR", "XS"},
          GaussianCopulaJoint(example1_marginals(), r),
          LimitState::builtin(design ? "example1_design" : "example1_safety")};
}

LognormalLinearProblem example1_lognormal(bool dependent, double a) {
  const Problem p = example1(dependent);
  return LognormalLinearProblem::from_joint(p.joint, {1.0, -1.0, 1.0, -1.0}, std::log(a));
}

Matrix example2_correlation() {
  Matrix r(4, 4);
  r << 1.0, 0.5, 0.3, 0.0,
       0.5, 1.0, 0.3, 0.0,
       0.3, 0.3, 1.0, 0.0,
       0.0, 0.0, 0.0, 1.0;
  return r;
}

Problem example2() {
  std::vector<Marginal> m{
      Marginal::from_moments(Distribution::Normal, 250.0, 0.3),
      Marginal::from_moments(Distribution::Normal, 125.0, 0.3),
      Marginal::from_moments(Distribution::Gumbel, 2500.0, 0.2),
      Marginal::from_moments(Distribution::Weibull, 40.0, 0.1),
  };
  return {{"M1", "M2", "P", "Y"},
          GaussianCopulaJoint(std::move(m), CorrelationMatrix(example2_correlation())),
          LimitState::builtin("example2_column")};
}

}  // namespace relsens
