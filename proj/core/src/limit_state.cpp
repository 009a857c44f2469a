#include "relsens/limit_state.hpp"

#include <cmath>
#include <string>

#include "relsens/error.hpp"

namespace relsens {
namespace {

constexpr double kColumnS1 = 0.03;
constexpr double kColumnS2 = 0.015;
constexpr double kColumnArea = 0.190;
constexpr double kMpaToKnPerM2 = 1000.0;

const std::vector<std::string> kExample1Names{"R", "S", "XR", "XS"};
const std::vector<std::string> kExample2Names{"M1", "M2", "P", "Y"};

void require_positive(std::span<const double> x, const std::vector<std::string>& names,
                      const char* lsf) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) {
      throw Error(ErrorKind::DomainError, std::string(lsf) + ": input " + names[i] + " = " +
                                              std::to_string(x[i]) + " must be positive");
    }
  }
}

}  // namespace

double LogLinearForm::constant_for(double a) const {
  if (!log_design) return const_term;
  if (!(a > 0.0)) {
    throw Error(ErrorKind::DomainError, "design parameter must be positive for a log-linear form");
  }
  return const_term + std::log(a);
}

LimitState LimitState::expression(const Expr& expr, std::vector<std::string> input_names) {
  auto bound = std::make_shared<const BoundExpr>(expr, input_names);
  LimitState ls;
  ls.source_ = Source::Expression;
  ls.name_ = bound->source();
  ls.names_ = std::move(input_names);
  ls.has_design_ = bound->has_design_param();
  ls.fn_ = [bound](std::span<const double> x, double a) { return bound->evaluate(x, a); };
  return ls;
}

LimitState LimitState::expression(std::string_view text, std::vector<std::string> input_names) {
  return expression(Expr::parse(text), std::move(input_names));
}

std::vector<std::string_view> LimitState::builtin_ids() {
  return {"example1_safety", "example1_design", "example2_column", "annex_affine"};
}

LimitState LimitState::builtin(std::string_view id) {
  LimitState ls;
  ls.source_ = Source::Builtin;
  ls.name_ = std::string(id);
  if (id == "example1_safety") {
    ls.names_ = kExample1Names;
    ls.log_linear_ = LogLinearForm{{1.0, -1.0, 1.0, -1.0}, 0.0, false};
    ls.fn_ = [](std::span<const double> x, double) {
      require_positive(x, kExample1Names, "example1_safety");
      return std::log(x[2]) + std::log(x[0]) - std::log(x[3]) - std::log(x[1]);
    };
    return ls;
  }
  if (id == "example1_design") {
    ls.names_ = kExample1Names;
    ls.has_design_ = true;
    ls.log_linear_ = LogLinearForm{{1.0, -1.0, 1.0, -1.0}, 0.0, true};
    ls.fn_ = [](std::span<const double> x, double a) { return a * x[2] * x[0] - x[3] * x[1]; };
    return ls;
  }
  if (id == "example2_column") {
    ls.names_ = kExample2Names;
    ls.fn_ = [](std::span<const double> x, double) {
      const double y = kMpaToKnPerM2 * x[3];
      if (!(y > 0.0)) {
        throw Error(ErrorKind::DomainError,
                    "example2_column: yield stress Y = " + std::to_string(x[3]) + " must be positive");
      }
      const double axial = x[2] / (kColumnArea * y);
      return 1.0 - x[0] / (kColumnS1 * y) - x[1] / (kColumnS2 * y) - axial * axial;
    };
    return ls;
  }
  if (id == "annex_affine") {
    throw Error(ErrorKind::Configuration,
                "builtin 'annex_affine' wraps an inner limit state; supply one");
  }
  throw Error(ErrorKind::Configuration, "unknown builtin limit state '" + std::string(id) + "'");
}

LimitState LimitState::annex_affine(const LimitState& inner) {
  if (inner.has_design_param()) {
    throw Error(ErrorKind::DesignParameter,
                "annex_affine: inner limit state already has a design parameter");
  }
  LimitState ls;
  ls.source_ = Source::Builtin;
  ls.name_ = "annex_affine(" + inner.name() + ")";
  ls.names_ = inner.names_;
  ls.has_design_ = true;
  ls.fn_ = [g = inner.fn_](std::span<const double> x, double a) { return g(x, 0.0) + a; };
  return ls;
}

LimitState LimitState::from_function(std::string name, std::vector<std::string> input_names,
                                     bool has_design_param, Fn fn) {
  LimitState ls;
  ls.source_ = Source::Function;
  ls.name_ = std::move(name);
  ls.names_ = std::move(input_names);
  ls.has_design_ = has_design_param;
  ls.fn_ = std::move(fn);
  return ls;
}

double LimitState::evaluate(std::span<const double> x, std::optional<double> a) const {
  if (x.size() != names_.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "limit state '" + name_ + "' expects " + std::to_string(names_.size()) +
                    " inputs, got " + std::to_string(x.size()));
  }
  if (has_design_ && !a) {
    throw Error(ErrorKind::DesignParameter,
                "limit state '" + name_ + "' needs a value for the design parameter 'a'");
  }
  if (!has_design_ && a) {
    throw Error(ErrorKind::DesignParameter,
                "limit state '" + name_ + "' has no design parameter but one was supplied");
  }
  const double g = fn_(x, a.value_or(0.0));
  if (std::isnan(g)) {
    throw Error(ErrorKind::Evaluation, "limit state '" + name_ + "' evaluated to NaN");
  }
  return g;
}

}  // namespace relsens
