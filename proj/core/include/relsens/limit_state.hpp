#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relsens/expr.hpp"

namespace relsens {

/// Failure {g <= 0} is equivalent to {const + [ln a] + sum coeffs[i] ln x_i <= 0}.
/// Lets the analytic estimator recognise log-linear limit states.
struct LogLinearForm {
  std::vector<double> coeffs;
  double const_term = 0.0;
  bool log_design = false;

  double constant_for(double a) const;
};

/// Evaluable limit-state function g(x, a); failure is {g <= 0}.
class LimitState {
 public:
  enum class Source { Expression, Builtin, Function };
  using Fn = std::function<double(std::span<const double>, double)>;

  static LimitState expression(const Expr& expr, std::vector<std::string> input_names);
  static LimitState expression(std::string_view text, std::vector<std::string> input_names);

  /// Built-in limit states.
  ///   example1_safety  inputs R, S, XR, XS:  ln XR + ln R - ln XS - ln S
  ///   example1_design  inputs R, S, XR, XS:  a XR R - XS S
  ///   example2_column  inputs M1, M2, P, Y (kNm, kNm, kN, MPa):
  ///                    1 - M1/(s1 y) - M2/(s2 y) - (P/(A y))^2 with y = 1000 Y in kN/m^2,
  ///                    s1 = 0.03 m^3, s2 = 0.015 m^3, A = 0.190 m^2
  /// annex_affine wraps another limit state and is built with annex_affine().
  static LimitState builtin(std::string_view id);
  /// g_d(x, a) = g(x) + a for an inner g without a design parameter.
  static LimitState annex_affine(const LimitState& inner);
  static LimitState from_function(std::string name, std::vector<std::string> input_names,
                                  bool has_design_param, Fn fn);

  static std::vector<std::string_view> builtin_ids();

  Source source() const noexcept { return source_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& input_names() const noexcept { return names_; }
  std::size_t dims() const noexcept { return names_.size(); }
  bool has_design_param() const noexcept { return has_design_; }
  const std::optional<LogLinearForm>& log_linear() const noexcept { return log_linear_; }

  /// Checked evaluation: `a` must be given iff the limit state has a design
  /// parameter (DesignParameter error otherwise).
  double evaluate(std::span<const double> x, std::optional<double> a = std::nullopt) const;
  /// Unchecked hot-path evaluation; `a` is ignored without a design parameter.
  double operator()(std::span<const double> x, double a = 0.0) const { return fn_(x, a); }

 private:
  LimitState() = default;

  Source source_ = Source::Function;
  std::string name_;
  std::vector<std::string> names_;
  bool has_design_ = false;
  std::optional<LogLinearForm> log_linear_;
  Fn fn_;
};

}  // namespace relsens
