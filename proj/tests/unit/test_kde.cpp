#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relsens/error.hpp"
#include "relsens/kde.hpp"
#include "relsens/rng.hpp"
#include "relsens/special.hpp"

using namespace relsens;

namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed, double mean = 0.0, double sd = 1.0) {
  Philox g(seed, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = mean + sd * g.normal();
  return v;
}

double integrate(auto&& f, double lo, double hi, int n = 20000) {
  const double h = (hi - lo) / n;
  double s = 0.5 * (f(lo) + f(hi));
  for (int k = 1; k < n; ++k) s += f(lo + k * h);
  return s * h;
}

}  // namespace

TEST(Kde, SilvermanBandwidthFormula) {
  const auto v = normal_sample(1000, 1);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (v.size() - 1));
  const double iqr = sample_quantile(v, 0.75) - sample_quantile(v, 0.25);
  const double want = 1.06 * std::min(sd, iqr / 1.34) * std::pow(1000.0, -0.2);
  EXPECT_NEAR(silverman_bandwidth(v), want, 1e-12);
}

TEST(Kde, BandwidthFallsBackToSdWithZeroIqr) {
  std::vector<double> v(100, 1.0);
  v[0] = 0.0;
  v[99] = 2.0;
  EXPECT_GT(silverman_bandwidth(v), 0.0);
}

TEST(Kde, SampleQuantileLinearInterpolation) {
  const std::vector<double> v{5, 1, 4, 2, 3};
  EXPECT_DOUBLE_EQ(sample_quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(sample_quantile(v, 0.3), 2.2);
  EXPECT_DOUBLE_EQ(sample_quantile(v, 1.0), 5.0);
}

TEST(Kde, DensityIntegratesToOneInBothSpaces) {
  const Marginal m = Marginal::from_moments(Distribution::Lognormal, 10.0, 0.3);
  Philox g(4, 0);
  std::vector<double> v(2000);
  for (auto& x : v) x = m.from_standard(g.normal());
  for (auto t : {KdeTransform::Identity, KdeTransform::MarginalStandardNormal}) {
    const KdeModel k(v, m, t);
    const double lo = t == KdeTransform::Identity ? -5.0 : 1e-3;
    EXPECT_NEAR(integrate([&](double x) { return k.density(x); }, lo, 60.0), 1.0, 5e-3);
  }
}

TEST(Kde, RecoversNormalDensity) {
  const auto v = normal_sample(20000, 8, 3.0, 2.0);
  const Marginal m = Marginal::normal(3.0, 2.0);
  const KdeModel k(v, m, KdeTransform::Identity);
  for (double x : {1.0, 3.0, 5.0}) {
    EXPECT_NEAR(k.density(x) / m.pdf(x), 1.0, 0.05) << x;
    EXPECT_NEAR(k.density_ratio(x), k.density(x) / m.pdf(x), 1e-12);
  }
  const KdeModel kt(v, m, KdeTransform::MarginalStandardNormal);
  EXPECT_NEAR(kt.density_ratio(3.0), 1.0, 0.05);
}

TEST(Kde, TooFewOrDegenerateValues) {
  const Marginal m = Marginal::normal(0.0, 1.0);
  EXPECT_THROW(KdeModel(normal_sample(10, 1), m, KdeTransform::Identity), Error);
  const std::vector<double> same(50, 0.5);
  try {
    KdeModel(same, m, KdeTransform::Identity);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateSample);
  }
}

TEST(Kde, EffectiveSampleSize) {
  const auto iid = normal_sample(20000, 2);
  EXPECT_NEAR(effective_sample_size(iid) / 20000.0, 1.0, 0.15);
  Philox g(6, 0);
  std::vector<double> ar(20000);
  double x = 0.0;
  for (auto& v : ar) {
    x = 0.9 * x + std::sqrt(1 - 0.81) * g.normal();
    v = x;
  }
  // AR(1) with coefficient 0.9 has ESS n (1 - 0.9) / (1 + 0.9).
  EXPECT_NEAR(effective_sample_size(ar) / (20000.0 / 19.0), 1.0, 0.3);
}
