#include "relsens/decision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "relsens/error.hpp"
#include "relsens/special.hpp"

namespace relsens {
namespace {

bool differs(double pf, Action prior, double ratio) {
  const Action posterior = pf <= ratio ? Action::DoNothing : Action::Replace;
  return posterior != prior;
}

std::vector<double> standard_abscissae(const ConditionalPfCurve& curve, const Marginal& marginal) {
  std::vector<double> z;
  z.reserve(curve.grid.size());
  for (double x : curve.grid) z.push_back(marginal.to_standard(x));
  return z;
}

void check_curve(const ConditionalPfCurve& curve) {
  if (curve.grid.size() != curve.pf_values.size() || curve.grid.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "conditional pF curve needs matching grid and values");
  }
}

double safety_trapezoid(const std::vector<double>& z, const std::vector<double>& pf, Action prior,
                        const SafetyDecision& d, std::size_t stride) {
  const double r = d.ratio();
  auto value = [&](std::size_t k) {
    return differs(pf[k], prior, r) ? std::fabs(d.c_f * pf[k] - d.c_r) * normal_pdf(z[k]) : 0.0;
  };
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < z.size(); k += stride) idx.push_back(k);
  if (idx.back() != z.size() - 1) idx.push_back(z.size() - 1);

  double acc = 0.0;
  for (std::size_t n = 1; n < idx.size(); ++n) {
    const std::size_t k0 = idx[n - 1];
    const std::size_t k1 = idx[n];
    const double v0 = value(k0);
    const double v1 = value(k1);
    const bool c0 = differs(pf[k0], prior, r);
    const bool c1 = differs(pf[k1], prior, r);
    const double dz = z[k1] - z[k0];
    if (c0 == c1 || pf[k1] == pf[k0]) {
      acc += 0.5 * dz * (v0 + v1);
      continue;
    }
    // The decision flips inside the interval; the integrand is zero at the flip.
    const double t = std::clamp((r - pf[k0]) / (pf[k1] - pf[k0]), 0.0, 1.0);
    acc += 0.5 * t * dz * v0 + 0.5 * (1.0 - t) * dz * v1;
  }
  return acc;
}

double density_mass(const std::vector<double>& z) {
  double acc = 0.0;
  for (std::size_t k = 1; k < z.size(); ++k) {
    acc += 0.5 * (z[k] - z[k - 1]) * (normal_pdf(z[k - 1]) + normal_pdf(z[k]));
  }
  return acc;
}

}  // namespace

SafetyDecision::SafetyDecision(double cost_failure, double cost_replacement)
    : c_f(cost_failure), c_r(cost_replacement) {
  if (!(c_r > 0.0) || !(c_f > c_r) || !std::isfinite(c_f)) {
    throw Error(ErrorKind::InvalidArgument, "safety decision needs 0 < c_r < c_f");
  }
}

std::string_view to_string(Action a) noexcept {
  return a == Action::DoNothing ? "do_nothing" : "replace";
}

Action prior_action(double pf, const SafetyDecision& d) {
  if (!(pf >= 0.0 && pf <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "pF must lie in [0, 1]");
  }
  return pf <= d.ratio() ? Action::DoNothing : Action::Replace;
}

std::vector<double> cvppi_curve(const ConditionalPfCurve& curve, const SafetyDecision& d) {
  check_curve(curve);
  const Action prior = prior_action(curve.pf_uncond, d);
  std::vector<double> out;
  out.reserve(curve.pf_values.size());
  for (double pf : curve.pf_values) {
    out.push_back(differs(pf, prior, d.ratio()) ? std::fabs(d.c_f * pf - d.c_r) : 0.0);
  }
  return out;
}

QuadratureResult evppi_safety_quadrature(const ConditionalPfCurve& curve, const Marginal& marginal,
                                         const SafetyDecision& d) {
  check_curve(curve);
  const Action prior = prior_action(curve.pf_uncond, d);
  const auto z = standard_abscissae(curve, marginal);
  QuadratureResult q;
  q.value = safety_trapezoid(z, curve.pf_values, prior, d, 1);
  if (z.size() >= 5) {
    q.error_estimate = std::fabs(q.value - safety_trapezoid(z, curve.pf_values, prior, d, 2));
  }
  return q;
}

double evppi_safety(const ConditionalPfCurve& curve, const Marginal& marginal, const SafetyDecision& d) {
  return evppi_safety_quadrature(curve, marginal, d).value;
}

double evpi_safety(double pf, const SafetyDecision& d) {
  if (!(pf >= 0.0 && pf <= 1.0)) throw Error(ErrorKind::InvalidArgument, "pF must lie in [0, 1]");
  if (pf <= d.ratio()) return pf * (d.c_f - d.c_r);
  return d.c_r * (1.0 - pf);
}

DesignDecision::DesignDecision(double c_f, const Expr& cost_model, std::vector<double> grid)
    : c_f_(c_f), cost_source_(cost_model.to_string()), cost_(cost_model, {}), grid_(std::move(grid)) {
  if (!(c_f_ > 0.0) || !std::isfinite(c_f_)) {
    throw Error(ErrorKind::InvalidArgument, "design decision needs c_f > 0");
  }
  if (grid_.empty()) throw Error(ErrorKind::InvalidArgument, "design grid is empty");
  for (std::size_t j = 1; j < grid_.size(); ++j) {
    if (!(grid_[j] > grid_[j - 1])) {
      throw Error(ErrorKind::InvalidArgument, "design grid must be strictly increasing");
    }
  }
  for (double a : grid_) {
    const double c = cost(a);
    if (!std::isfinite(c)) {
      throw Error(ErrorKind::InvalidArgument,
                  "design cost is not finite at a = " + std::to_string(a));
    }
    costs_.push_back(c);
  }
}

double DesignDecision::cost(double a) const { return cost_.evaluate({}, a); }

std::vector<double> linear_grid(double lo, double hi, std::size_t m) {
  if (m == 0) throw Error(ErrorKind::InvalidArgument, "grid needs at least one point");
  if (m == 1) return {lo};
  if (!(hi > lo)) throw Error(ErrorKind::InvalidArgument, "grid upper bound must exceed lower bound");
  std::vector<double> g(m);
  for (std::size_t j = 0; j < m; ++j) {
    g[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(m - 1);
  }
  g.back() = hi;
  return g;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0)) throw Error(ErrorKind::InvalidArgument, "log grid needs a positive lower bound");
  auto g = linear_grid(std::log(lo), std::log(hi), n);
  for (double& v : g) v = std::exp(v);
  if (n > 1) {
    g.front() = lo;
    g.back() = hi;
  }
  return g;
}

PriorDesign prior_design(const std::vector<double>& pf_per_design, const DesignDecision& d) {
  if (pf_per_design.size() != d.size()) {
    throw Error(ErrorKind::Configuration, "one pF per design value is required");
  }
  PriorDesign best;
  best.expected_loss = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double loss = d.costs()[j] + pf_per_design[j] * d.c_f();
    if (loss < best.expected_loss) {
      best = {j, d.grid()[j], pf_per_design[j], loss};
    }
  }
  return best;
}

std::vector<double> posterior_loss_curve(const std::vector<ConditionalPfCurve>& curves,
                                         const DesignDecision& d) {
  if (curves.size() != d.size()) {
    throw Error(ErrorKind::Configuration, "one conditional pF curve per design value is required");
  }
  const auto& grid = curves.front().grid;
  for (const auto& c : curves) {
    check_curve(c);
    if (c.grid != grid) {
      throw Error(ErrorKind::Configuration, "conditional pF curves use different grids");
    }
  }
  std::vector<double> loss(grid.size(), std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < curves.size(); ++j) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      loss[k] = std::min(loss[k], d.costs()[j] + curves[j].pf_values[k] * d.c_f());
    }
  }
  return loss;
}

DesignEvppi evppi_design(const std::vector<ConditionalPfCurve>& curves,
                         const std::vector<double>& pf_per_design, const DesignDecision& d,
                         const Marginal& marginal) {
  const auto loss = posterior_loss_curve(curves, d);
  const auto z = standard_abscissae(curves.front(), marginal);
  double acc = 0.0;
  for (std::size_t k = 1; k < z.size(); ++k) {
    acc += 0.5 * (z[k] - z[k - 1]) * (loss[k - 1] * normal_pdf(z[k - 1]) + loss[k] * normal_pdf(z[k]));
  }
  DesignEvppi r;
  r.prior_loss = prior_design(pf_per_design, d).expected_loss;
  r.posterior_loss = acc / density_mass(z);
  r.raw = r.prior_loss - r.posterior_loss;
  r.floored = r.raw < 0.0;
  r.value = std::max(0.0, r.raw);
  if (d.size() == 1) {
    r.value = 0.0;
    r.raw = 0.0;
    r.floored = false;
  }
  return r;
}

EvppiReport normalize(EvppiReport report) {
  double sum = 0.0;
  for (const auto& in : report.inputs) sum += in.absolute;
  report.normalized_defined = sum > 0.0;
  for (auto& in : report.inputs) {
    in.normalized = report.normalized_defined ? in.absolute / sum
                                              : std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

EvppiReport relativize(EvppiReport report, double evpi) {
  if (!(evpi >= 0.0)) throw Error(ErrorKind::InvalidArgument, "EVPI must be nonnegative");
  report.evpi = evpi;
  for (auto& in : report.inputs) {
    in.relative = evpi > 0.0 ? std::min(1.0, in.absolute / evpi) : 0.0;
  }
  return report;
}

std::vector<SweepRow> threshold_sweep(const std::vector<ConditionalPfCurve>& curves,
                                      const std::vector<Marginal>& marginals,
                                      const std::vector<std::string>& names, double pf, double c_f,
                                      const std::vector<double>& ratios, const std::string& method) {
  if (curves.size() != marginals.size() || curves.size() != names.size()) {
    throw Error(ErrorKind::InvalidArgument, "threshold sweep: mismatched inputs");
  }
  std::vector<SweepRow> rows;
  for (double ratio : ratios) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
      throw Error(ErrorKind::Configuration, "cost ratio " + std::to_string(ratio) + " is outside (0, 1)");
    }
    const SafetyDecision d(c_f, ratio * c_f);
    EvppiReport rep;
    rep.method = method;
    for (std::size_t i = 0; i < curves.size(); ++i) {
      const auto q = evppi_safety_quadrature(curves[i], marginals[i], d);
      rep.inputs.push_back({names[i], q.value, 0.0, std::nullopt});
      rep.diagnostics.quadrature_error = std::max(rep.diagnostics.quadrature_error, q.error_estimate);
    }
    rows.push_back({ratio, relativize(normalize(std::move(rep)), evpi_safety(pf, d))});
  }
  return rows;
}

}  // namespace relsens
