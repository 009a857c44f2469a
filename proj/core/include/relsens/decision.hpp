#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relsens/conditional_pf.hpp"
#include "relsens/expr.hpp"

namespace relsens {

/// Keep the system (do nothing) or replace/strengthen it.
struct SafetyDecision {
  double c_f = 0.0;
  double c_r = 0.0;

  SafetyDecision(double cost_failure, double cost_replacement);
  double ratio() const noexcept { return c_r / c_f; }
};

enum class Action { DoNothing, Replace };

std::string_view to_string(Action a) noexcept;

/// DoNothing iff pf <= c_r / c_f.
Action prior_action(double pf, const SafetyDecision& d);

/// |c_f pf(x) - c_r| where the conditional optimum differs from the prior one, else 0.
std::vector<double> cvppi_curve(const ConditionalPfCurve& curve, const SafetyDecision& d);

struct QuadratureResult {
  double value = 0.0;
  /// |I(h) - I(2h)| from the same rule on every other grid point.
  double error_estimate = 0.0;
};

/// EVPPI of one input: CVPPI integrated against the input's prior, trapezoid
/// in z = Phi^-1(F(x)) with decision-boundary crossings located by linear
/// interpolation of pf between grid points.
QuadratureResult evppi_safety_quadrature(const ConditionalPfCurve& curve, const Marginal& marginal,
                                         const SafetyDecision& d);
double evppi_safety(const ConditionalPfCurve& curve, const Marginal& marginal, const SafetyDecision& d);

/// Value of knowing whether failure occurs.
double evpi_safety(double pf, const SafetyDecision& d);

/// Choice of a design parameter a from a discrete grid with cost c_d(a).
class DesignDecision {
 public:
  DesignDecision(double c_f, const Expr& cost_model, std::vector<double> grid);

  double c_f() const noexcept { return c_f_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& costs() const noexcept { return costs_; }
  const std::string& cost_source() const noexcept { return cost_source_; }
  std::size_t size() const noexcept { return grid_.size(); }
  double cost(double a) const;

 private:
  double c_f_;
  std::string cost_source_;
  BoundExpr cost_;
  std::vector<double> grid_;
  std::vector<double> costs_;
};

/// m points from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t m);

struct PriorDesign {
  std::size_t index = 0;
  double a_opt = 0.0;
  double pf = 0.0;
  double expected_loss = 0.0;
};

/// argmin over the grid of c_d(a_j) + pf_j c_f; ties go to the smallest a.
PriorDesign prior_design(const std::vector<double>& pf_per_design, const DesignDecision& d);

struct DesignEvppi {
  double value = 0.0;
  double raw = 0.0;
  double prior_loss = 0.0;
  double posterior_loss = 0.0;
  bool floored = false;
};

/// Pointwise posterior loss min_j [c_d(a_j) + pf(x, a_j) c_f] on the shared grid.
std::vector<double> posterior_loss_curve(const std::vector<ConditionalPfCurve>& curves,
                                         const DesignDecision& d);

/// Design-case EVPPI for one input from one curve per design value.
DesignEvppi evppi_design(const std::vector<ConditionalPfCurve>& curves,
                         const std::vector<double>& pf_per_design, const DesignDecision& d,
                         const Marginal& marginal);

struct InputEvppi {
  std::string name;
  double absolute = 0.0;
  double normalized = 0.0;
  std::optional<double> relative;
};

struct EvppiDiagnostics {
  std::size_t n_failure_samples = 0;
  double clip_fraction = 0.0;
  double quadrature_error = 0.0;
  std::size_t floored = 0;
  double effective_sample_size = 0.0;
};

struct EvppiReport {
  std::string method;
  std::vector<InputEvppi> inputs;
  std::optional<double> evpi;
  bool normalized_defined = false;
  EvppiDiagnostics diagnostics;
};

/// Divides by the sum of absolute values; flags the report when all are zero.
EvppiReport normalize(EvppiReport report);
/// relative = absolute / evpi.
EvppiReport relativize(EvppiReport report, double evpi);

struct SweepRow {
  double ratio = 0.0;
  EvppiReport report;
};

/// Safety EVPPI of every input for each cost ratio c_r / c_f with c_f fixed.
std::vector<SweepRow> threshold_sweep(const std::vector<ConditionalPfCurve>& curves,
                                      const std::vector<Marginal>& marginals,
                                      const std::vector<std::string>& names, double pf, double c_f,
                                      const std::vector<double>& ratios, const std::string& method);

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

}  // namespace relsens
