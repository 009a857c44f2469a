#include "relsens/special.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "relsens/error.hpp"

namespace relsens {
namespace {

// W. J. Cody, "Rational Chebyshev approximations for the error function",
// Math. Comp. 1969. For |x| <= 0.46875 returns erfc(x); above that returns
// the scaled value erfcx(|x|) = exp(x^2) erfc(|x|), leaving the Gaussian
// factor to the caller.
double cody_erfc_small(double x) {
  static constexpr std::array<double, 5> a = {
      3.1611237438705656, 113.864154151050156, 377.485237685302021,
      3209.37758913846947, .185777706184603153};
  static constexpr std::array<double, 4> b = {
      23.6012909523441209, 244.024637934444173, 1282.61652607737228,
      2844.23683343917062};
  constexpr double xsmall = 1.11e-16;
  const double y = std::fabs(x);
  const double ysq = y > xsmall ? y * y : 0.0;
  double xnum = a[4] * ysq;
  double xden = ysq;
  for (int i = 0; i < 3; ++i) {
    xnum = (xnum + a[i]) * ysq;
    xden = (xden + b[i]) * ysq;
  }
  return 1.0 - x * (xnum + a[3]) / (xden + b[3]);
}

double cody_erfcx(double y) {
  static constexpr std::array<double, 9> c = {
      .564188496988670089, 8.88314979438837594, 66.1191906371416295,
      298.635138197400131, 881.95222124176909,  1712.04761263407058,
      2051.07837782607147, 1230.33935479799725, 2.15311535474403846e-8};
  static constexpr std::array<double, 8> d = {
      15.7449261107098347, 117.693950891312499, 537.181101862009858,
      1621.38957456669019, 3290.79923573345963, 4362.61909014324716,
      3439.36767414372164, 1230.33935480374942};
  static constexpr std::array<double, 6> p = {
      .305326634961232344, .360344899949804439, .125781726111229246,
      .0160837851487422766, 6.58749161529837803e-4, .0163153871373020978};
  static constexpr std::array<double, 5> q = {
      2.56852019228982242, 1.87295284992346047, .527905102951428412,
      .0605183413124413191, .00233520497626869185};
  constexpr double sqrpi = 0.56418958354775628695;
  constexpr double xhuge = 6.71e7;

  if (y <= 4.0) {
    double xnum = c[8] * y;
    double xden = y;
    for (int i = 0; i < 7; ++i) {
      xnum = (xnum + c[i]) * y;
      xden = (xden + d[i]) * y;
    }
    return (xnum + c[7]) / (xden + d[7]);
  }
  if (y >= xhuge) return sqrpi / y;
  const double ysq = 1.0 / (y * y);
  double xnum = p[5] * ysq;
  double xden = ysq;
  for (int i = 0; i < 4; ++i) {
    xnum = (xnum + p[i]) * ysq;
    xden = (xden + q[i]) * ysq;
  }
  const double r = ysq * (xnum + p[4]) / (xden + q[4]);
  return (sqrpi - r) / y;
}

// Phi(x) for x <= 0 with full relative precision. exp(-x^2/2) is evaluated
// from x itself with Cody's splitting so the rounding of x/sqrt(2) does not
// get amplified in the far tail.
double lower_tail(double x) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  constexpr double thresh = 0.46875;
  const double y = -x * inv_sqrt2;
  if (y <= thresh) return 0.5 * cody_erfc_small(y);
  if (x < -38.6) return 0.0;
  const double xs = std::trunc(x * 16.0) / 16.0;
  const double del = (x - xs) * (x + xs);
  return 0.5 * cody_erfcx(y) * std::exp(-0.5 * xs * xs) * std::exp(-0.5 * del);
}

double rational(const double* num, const double* den, std::size_t n, double t) {
  double u = num[n - 1];
  double v = den[n - 1];
  for (std::size_t k = n - 1; k > 0; --k) {
    u = t * u + num[k - 1];
    v = t * v + den[k - 1];
  }
  return u / v;
}

// AS241 PPND16 for the lower-tail probability p (0 < p <= 0.5 in the tails,
// any p in (0,1) in the central region).
double as241(double p, double q_complement) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    static constexpr double a[8] = {
        3.387132872796366608,  133.14166789178437745, 1971.5909503065514427,
        13731.693765509461125, 45921.953931549871457, 67265.770927008700853,
        33430.575583588128105, 2509.0809287301226727};
    static constexpr double b[8] = {
        1.0,                   42.313330701600911252, 687.1870074920579083,
        5394.1960214247511077, 21213.794301586595867, 39307.89580009271061,
        28729.085735721942674, 5226.495278852854561};
    return q * rational(a, b, 8, 0.180625 - q * q);
  }
  // Tail: r = sqrt(-log(min(p, 1-p))) with the smaller tail passed in
  // exactly by the caller.
  const double tail_p = q < 0.0 ? p : q_complement;
  double r = std::sqrt(-std::log(tail_p));
  double val;
  if (r <= 5.0) {
    static constexpr double a[8] = {
        1.42343711074968357734,  4.6303378461565452959,
        5.7694972214606914055,   3.64784832476320460504,
        1.27045825245236838258,  0.24178072517745061177,
        0.0227238449892691845833, 7.7454501427834140764e-4};
    static constexpr double b[8] = {
        1.0,                      2.05319162663775882187,
        1.6763848301838038494,    0.68976733498510000455,
        0.14810397642748007459,   0.0151986665636164571966,
        5.475938084995344946e-4,  1.05075007164441684324e-9};
    val = rational(a, b, 8, r - 1.6);
  } else {
    static constexpr double a[8] = {
        6.6579046435011037772,     5.4637849111641143699,
        1.7848265399172913358,     0.29656057182850489123,
        0.026532189526576123093,   0.0012426609473880784386,
        2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static constexpr double b[8] = {
        1.0,                       0.59983220655588793769,
        0.13692988092273580531,    0.0148753612908506148525,
        7.868691311456132591e-4,   1.8463183175100546818e-5,
        1.4215117583164458887e-7,  2.04426310338993978564e-15};
    val = rational(a, b, 8, r - 5.0);
  }
  return q < 0.0 ? -val : val;
}

// Genz's BVNU: P[X > sh, Y > sk] with correlation r, |r| <= 1.
double bvnu(double sh, double sk, double r) {
  static constexpr double w[3][10] = {
      {.1713244923791705, .3607615730481384, .4679139345726904},
      {.04717533638651177, .1069393259953183, .1600783285433464,
       .2031674267230659, .2334925365383547, .2491470458134029},
      {.01761400713915212, .04060142980038694, .06267204833410906,
       .08327674157670475, .1019301198172404, .1181945319615184,
       .1316886384491766, .1420961093183821, .1491729864726037,
       .1527533871307259}};
  static constexpr double x[3][10] = {
      {-.9324695142031522, -.6612093864662647, -.238619186083197},
      {-.9815606342467191, -.904117256370475, -.769902674194305,
       -.5873179542866171, -.3678314989981802, -.1252334085114692},
      {-.9931285991850949, -.9639719272779138, -.9122344282513259,
       -.8391169718222188, -.7463319064601508, -.636053680726515,
       -.5108670019508271, -.3737060887154196, -.2277858511416451,
       -.07652652113349733}};
  constexpr double two_pi = 6.283185307179586;

  int ng;
  int lg;
  if (std::fabs(r) < 0.3) {
    ng = 0;
    lg = 3;
  } else if (std::fabs(r) < 0.75) {
    ng = 1;
    lg = 6;
  } else {
    ng = 2;
    lg = 10;
  }
  double h = sh;
  double k = sk;
  double hk = h * k;
  double bvn = 0.0;
  if (std::fabs(r) < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r);
    for (int i = 0; i < lg; ++i) {
      double sn = std::sin(asr * (x[ng][i] + 1.0) / 2.0);
      bvn += w[ng][i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      sn = std::sin(asr * (-x[ng][i] + 1.0) / 2.0);
      bvn += w[ng][i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    return bvn * asr / (2.0 * two_pi) + normal_cdf(-h) * normal_cdf(-k);
  }
  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::fabs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-(bs / as + hk) / 2.0) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
      const double bb = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(two_pi) * normal_cdf(-bb / a) * bb *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < lg; ++i) {
      double xs = a * (x[ng][i] + 1.0);
      xs *= xs;
      double rs = std::sqrt(1.0 - xs);
      bvn += a * w[ng][i] *
             (std::exp(-bs / (xs * 2.0) - hk / (rs + 1.0)) / rs -
              std::exp(-(bs / xs + hk) / 2.0) * (c * xs * (d * xs + 1.0) + 1.0));
      xs = as * (-x[ng][i] + 1.0) * (-x[ng][i] + 1.0) / 4.0;
      rs = std::sqrt(1.0 - xs);
      bvn += a * w[ng][i] * std::exp(-(bs / xs + hk) / 2.0) *
             (std::exp(-hk * (1.0 - rs) / ((rs + 1.0) * 2.0)) / rs -
              (c * xs * (d * xs + 1.0) + 1.0));
    }
    bvn = -bvn / two_pi;
  }
  if (r > 0.0) bvn += normal_cdf(-std::max(h, k));
  if (r < 0.0) bvn = -bvn + std::max(0.0, normal_cdf(-h) - normal_cdf(-k));
  return bvn;
}

}  // namespace

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) noexcept {
  if (std::isnan(x)) return x;
  if (x <= 0.0) return lower_tail(x);
  return 1.0 - lower_tail(-x);
}

double normal_sf(double x) noexcept {
  if (std::isnan(x)) return x;
  if (x >= 0.0) return lower_tail(-x);
  return 1.0 - lower_tail(x);
}

double normal_inv_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::OutOfDomain,
                "normal_inv_cdf: probability must lie strictly inside (0,1), got " +
                    std::to_string(p));
  }
  double z = as241(p, 1.0 - p);
  // One Newton step on the lower tail where the relative precision of p is
  // best; AS241 is already ~1e-16, this only polishes rounding.
  if (p < 0.5) {
    const double pdf = normal_pdf(z);
    if (pdf > 0.0) z -= (normal_cdf(z) - p) / pdf;
  }
  return z;
}

double normal_inv_sf(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorKind::OutOfDomain,
                "normal_inv_sf: probability must lie strictly inside (0,1), got " +
                    std::to_string(q));
  }
  if (q < 0.5) return -normal_inv_cdf(q);
  return normal_inv_cdf(1.0 - q);
}

namespace {

// bvnu is accurate to ~1e-16 absolute; below this the result is recomputed
// to full relative precision.
constexpr double kBvnTailSwitch = 1e-7;

// Phi2(h, k, r) = int_{-inf}^{k} phi(y) Phi((h - r y) / sqrt(1 - r^2)) dy with
// k the smaller limit, written as phi(k) int_0^inf exp(k t - t^2 / 2) ... dt so
// the tail factor never underflows inside the integral.
double bvn_lower_tail(double h, double k, double r) {
  if (k > h) std::swap(h, k);
  const double phi_k = normal_pdf(k);
  if (phi_k == 0.0) return 0.0;
  const double s = std::sqrt((1.0 - r) * (1.0 + r));
  auto integrand = [&](double t) {
    const double e = std::exp(t * (k - 0.5 * t));
    return e == 0.0 ? 0.0 : e * normal_cdf((h - r * (k - t)) / s);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double err = 0.0;
  const double value = GK::integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-14, &err);
  return std::clamp(phi_k * value, 0.0, 1.0);
}

}  // namespace

double bivariate_normal_cdf(double x1, double x2, double r) {
  if (std::isnan(x1) || std::isnan(x2) || std::isnan(r)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (std::fabs(r) > 1.0) {
    throw Error(ErrorKind::InvalidCorrelation,
                "bivariate_normal_cdf: correlation must satisfy |r| <= 1, got " +
                    std::to_string(r));
  }
  if (x1 == -HUGE_VAL || x2 == -HUGE_VAL) return 0.0;
  if (x1 == HUGE_VAL) return normal_cdf(x2);
  if (x2 == HUGE_VAL) return normal_cdf(x1);
  if (r == 1.0) return normal_cdf(std::min(x1, x2));
  if (r == -1.0) return std::max(0.0, normal_cdf(x1) - normal_cdf(-x2));
  const double v = bvnu(-x1, -x2, r);
  if (v >= kBvnTailSwitch) return std::min(v, 1.0);
  return bvn_lower_tail(x1, x2, r);
}

const GaussHermiteRule& gauss_hermite_rule(std::size_t points) {
  static std::mutex mutex;
  static std::map<std::size_t, GaussHermiteRule> cache;
  std::lock_guard lock(mutex);
  if (const auto it = cache.find(points); it != cache.end()) return it->second;
  if (points == 0) throw Error(ErrorKind::InvalidArgument, "gauss_hermite_rule: zero points");

  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite
  // polynomials: zero diagonal, off-diagonal sqrt(k).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (std::size_t k = 1; k < points; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussHermiteRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  double total = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    rule.nodes[k] = solver.eigenvalues()(k);
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights[k] = v0 * v0;
    total += rule.weights[k];
  }
  for (double& w : rule.weights) w /= total;
  return cache.emplace(points, std::move(rule)).first->second;
}

}  // namespace relsens
