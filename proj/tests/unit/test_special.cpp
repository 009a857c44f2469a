#include <gtest/gtest.h>

#include <cmath>
#include <utility>

#include "relsens/error.hpp"
#include "relsens/special.hpp"

using namespace relsens;

namespace {

double cdf_oracle(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST(NormalCdf, MatchesErfcAcrossRange) {
  for (double x = -8.0; x <= 8.0; x += 0.125) {
    const double want = cdf_oracle(x);
    EXPECT_NEAR(normal_cdf(x), want, 1e-15 + 1e-14 * want) << x;
    EXPECT_NEAR(normal_sf(x), cdf_oracle(-x), 1e-15 + 1e-14 * cdf_oracle(-x)) << x;
  }
}

TEST(NormalCdf, DeepLowerTailKeepsRelativePrecision) {
  // 40-digit reference values; erfc(x / sqrt2) loses ~x^2 ulps to the rounded argument.
  const std::pair<double, double> cases[] = {{-10.0, 7.619853024160526066e-24},
                                             {-20.0, 2.7536241186062336951e-89},
                                             {-30.0, 4.9067139271481870595e-198},
                                             {-37.0, 5.7255712225245768227e-300}};
  for (const auto& [x, want] : cases) {
    EXPECT_NEAR(normal_cdf(x) / want, 1.0, 1e-13) << x;
  }
}

TEST(NormalCdf, InfiniteArguments) {
  EXPECT_EQ(normal_cdf(-INFINITY), 0.0);
  EXPECT_EQ(normal_cdf(INFINITY), 1.0);
  EXPECT_EQ(normal_sf(INFINITY), 0.0);
}

TEST(NormalInvCdf, RoundTrip) {
  for (double p : {1e-300, 1e-100, 1e-20, 1e-8, 1e-3, 0.02425, 0.1, 0.5, 0.77, 0.97575, 0.999999}) {
    const double x = normal_inv_cdf(p);
    EXPECT_NEAR(normal_cdf(x) / p, 1.0, 1e-12) << p;
  }
  for (double q : {1e-250, 1e-12, 1e-3, 0.3}) {
    EXPECT_NEAR(normal_sf(normal_inv_sf(q)) / q, 1.0, 1e-12) << q;
  }
}

TEST(NormalInvCdf, RejectsOutsideOpenInterval) {
  EXPECT_THROW(normal_inv_cdf(0.0), Error);
  EXPECT_THROW(normal_inv_cdf(1.0), Error);
  EXPECT_THROW(normal_inv_cdf(-0.1), Error);
  EXPECT_THROW(normal_inv_cdf(NAN), Error);
  try {
    normal_inv_cdf(2.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfDomain);
  }
}

TEST(BivariateNormal, FrozenQuadratureOracle) {
  // Values from one-dimensional adaptive quadrature of
  // phi(t) Phi((x2 - r t) / sqrt(1 - r^2)) over t < x1.
  struct Case {
    double x1, x2, r, want;
  };
  const Case cases[] = {
      {0.3, -0.7, 0.5, 0.20652377978573902},
      {-2.0, -1.5, -0.8, 6.835067136836359e-10},
      {1.2, 0.4, 0.95, 0.6552537896360383},
      {-3.5, -3.1, 0.3, 4.54146510257105e-06},
      {0.0, 0.0, -0.99, 0.022526706822206068},
      {2.0, -0.5, 0.0, 0.30151826900900425},
  };
  for (const auto& c : cases) {
    EXPECT_NEAR(bivariate_normal_cdf(c.x1, c.x2, c.r), c.want, 1e-14 + 1e-10 * c.want)
        << c.x1 << " " << c.x2 << " " << c.r;
  }
}

TEST(BivariateNormal, DeepTailKeepsRelativePrecision) {
  // 80-digit quadrature values, frozen.
  struct Case {
    double h, k, r, want;
  };
  const Case cases[] = {{-0.77420657927433145, -13.478070814678468, -0.20487907445100983, 1.508286814151891559e-45},
                        {-6.0, -7.0, 0.5, 3.2934447318745694095e-15},
                        {-3.0, -3.0, -0.9, 3.269436016883931726e-43},
                        {-9.0, 2.0, 0.3, 1.1285880050991672697e-19},
                        {-5.5, -5.5, 0.95, 6.9116199293168441113e-9}};
  for (const auto& c : cases) {
    EXPECT_NEAR(bivariate_normal_cdf(c.h, c.k, c.r) / c.want, 1.0, 1e-11) << c.h << " " << c.k << " " << c.r;
  }
}

TEST(BivariateNormal, OrthantIdentity) {
  for (double r = -0.99; r < 1.0; r += 0.09) {
    EXPECT_NEAR(bivariate_normal_cdf(0.0, 0.0, r), 0.25 + std::asin(r) / (2.0 * kPi), 1e-14) << r;
  }
}

TEST(BivariateNormal, DegenerateCorrelations) {
  EXPECT_NEAR(bivariate_normal_cdf(0.4, -0.2, 1.0), normal_cdf(-0.2), 1e-15);
  EXPECT_NEAR(bivariate_normal_cdf(0.4, -0.2, -1.0), std::max(0.0, normal_cdf(0.4) - normal_cdf(0.2)), 1e-15);
  EXPECT_NEAR(bivariate_normal_cdf(0.4, -0.2, 0.0), normal_cdf(0.4) * normal_cdf(-0.2), 1e-15);
  EXPECT_THROW(bivariate_normal_cdf(0.0, 0.0, 1.01), Error);
}

TEST(BivariateNormal, SymmetricInArguments) {
  for (double r : {-0.7, -0.2, 0.3, 0.85}) {
    EXPECT_NEAR(bivariate_normal_cdf(0.9, -1.3, r), bivariate_normal_cdf(-1.3, 0.9, r), 1e-15);
  }
}

TEST(GaussHermite, IntegratesPolynomialMoments) {
  const auto& rule = gauss_hermite_rule(20);
  double w = 0.0, m2 = 0.0, m4 = 0.0, m6 = 0.0, m3 = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double z = rule.nodes[k];
    w += rule.weights[k];
    m2 += rule.weights[k] * z * z;
    m3 += rule.weights[k] * z * z * z;
    m4 += rule.weights[k] * std::pow(z, 4);
    m6 += rule.weights[k] * std::pow(z, 6);
  }
  EXPECT_NEAR(w, 1.0, 1e-14);
  EXPECT_NEAR(m2, 1.0, 1e-13);
  EXPECT_NEAR(m3, 0.0, 1e-13);
  EXPECT_NEAR(m4, 3.0, 1e-12);
  EXPECT_NEAR(m6, 15.0, 1e-11);
}

TEST(GaussHermite, LognormalMean) {
  const auto& rule = gauss_hermite_rule(32);
  double m = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) m += rule.weights[k] * std::exp(0.4 * rule.nodes[k]);
  EXPECT_NEAR(m, std::exp(0.08), 1e-13);
}
