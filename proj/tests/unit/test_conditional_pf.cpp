#include <gtest/gtest.h>

#include <cmath>

#include "relsens/conditional_pf.hpp"
#include "relsens/error.hpp"
#include "relsens/problems.hpp"
#include "relsens/sampling.hpp"
#include "relsens/special.hpp"

using namespace relsens;

TEST(QuantileGrid, EquallySpacedInStandardSpace) {
  const Marginal m = Marginal::from_moments(Distribution::Gumbel, 2500.0, 0.2);
  const auto g = quantile_grid(m);
  ASSERT_EQ(g.size(), 512u);
  const double z0 = normal_inv_cdf(1e-6);
  EXPECT_NEAR(m.to_standard(g.front()), z0, 1e-8);
  EXPECT_NEAR(m.to_standard(g.back()), -z0, 1e-8);
  const double h = -2.0 * z0 / 511.0;
  for (std::size_t k = 1; k < g.size(); ++k) {
    EXPECT_NEAR(m.to_standard(g[k]) - m.to_standard(g[k - 1]), h, 1e-8);
  }
}

TEST(ConditionalPf, AnalyticCurvesRecoverTotalProbability) {
  for (bool dependent : {false, true}) {
    const auto problem = example1_lognormal(dependent);
    const double pf = lognormal_linear_pf(problem);
    const Problem p = example1(dependent);
    for (std::size_t i = 0; i < 4; ++i) {
      const auto c = analytic_curve(problem, i, quantile_grid(p.joint.marginal(i)));
      EXPECT_EQ(c.source, CurveSource::Analytic);
      EXPECT_NEAR(total_probability(c, p.joint.marginal(i)) / pf, 1.0, 3e-4) << i;
    }
  }
}

TEST(ConditionalPf, FormCurvesRecoverTotalProbability) {
  const Problem p = example1(false);
  const FormResult f = run_form(p.joint, p.lsf);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto c = form_curve(p.joint, i, f, quantile_grid(p.joint.marginal(i)));
    // The grid drops 2e-6 of prior mass where pf(x) can approach 1.
    EXPECT_NEAR(total_probability(c, p.joint.marginal(i)) / normal_cdf(-f.beta0), 1.0, 3e-4);
  }
  const Problem q = example1(true);
  const FormResult fq = run_form(q.joint, q.lsf);
  EXPECT_THROW(form_curve(q.joint, 0, fq, quantile_grid(q.joint.marginal(0))), Error);
}

TEST(ConditionalPf, SampleBasedCurveTracksAnalyticCurve) {
  const Problem p = example1(false);
  const auto problem = example1_lognormal(false);
  McOptions opts;
  opts.n = 500000;
  opts.seed = 21;
  const McResult mc = crude_mc(p.joint, p.lsf, std::nullopt, opts);
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<double> values(static_cast<std::size_t>(mc.failure_samples.rows()));
    for (std::size_t r = 0; r < values.size(); ++r) values[r] = mc.failure_samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i));
    const auto grid = quantile_grid(p.joint.marginal(i));
    const auto kde = conditional_pf_from_failure_samples(p.joint, i, values, mc.pf_hat, grid);
    EXPECT_EQ(kde.source, CurveSource::Kde);
    EXPECT_EQ(kde.n_failure_samples, values.size());
    EXPECT_NEAR(total_probability(kde, p.joint.marginal(i)) / mc.pf_hat, 1.0, 0.02);
    for (double v : kde.pf_values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    // Near the median the density ratio is well resolved.
    const std::size_t mid = grid.size() / 2;
    const double want = lognormal_linear_conditional_pf(problem, i, kde.grid[mid]);
    EXPECT_NEAR(kde.pf_values[mid] / want, 1.0, 0.15) << i;
  }
}

TEST(ConditionalPf, CorrelatedSamplesReportEffectiveSize) {
  const Problem p = example1(false);
  SubsetOptions opts;
  opts.seed = 2;
  const SubsetResult ss = subset_simulation(p.joint, p.lsf, std::nullopt, opts);
  std::vector<double> values(static_cast<std::size_t>(ss.last_level_samples.rows()));
  for (std::size_t r = 0; r < values.size(); ++r) values[r] = ss.last_level_samples(static_cast<Eigen::Index>(r), 1);
  KdeCurveOptions kopts;
  kopts.correlated = true;
  const auto c = conditional_pf_from_failure_samples(p.joint, 1, values, ss.pf_hat,
                                                     quantile_grid(p.joint.marginal(1)), kopts);
  EXPECT_GT(c.effective_sample_size, 0.0);
  EXPECT_LE(c.effective_sample_size, static_cast<double>(values.size()) * 1.01);
}
