#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relsens/joint.hpp"
#include "relsens/kde.hpp"
#include "relsens/limit_state.hpp"
#include "relsens/marginal.hpp"

namespace relsens {

enum class Method { Analytic, Form, Mc, Subset };

std::string_view to_string(Method m) noexcept;
Method method_from_string(std::string_view name);

struct InputSpec {
  std::string name;
  Distribution kind = Distribution::Normal;
  std::optional<double> mean;
  std::optional<double> cov;
  std::optional<std::array<double, 2>> params;
};

struct LsfSpec {
  std::string builtin;     // empty for expressions
  std::string expression;  // empty for builtins
  std::shared_ptr<const LsfSpec> inner;  // annex_affine only
};

struct LogLinearSpec {
  std::vector<double> coefficients;
  double constant = 0.0;
  bool log_design = false;
};

struct SafetySpec {
  double c_f = 0.0;
  std::vector<double> c_r;
  /// Design value at which a design-parameter limit state is assessed.
  std::optional<double> a;
};

struct DesignSpec {
  double c_f = 0.0;
  std::string cost;
  std::vector<double> grid;
};

struct SamplingSpec {
  std::size_t n = 0;
  std::size_t n_per_level = 0;
  double p0 = 0.1;
  std::size_t threads = 1;
  KdeTransform kde_transform = KdeTransform::MarginalStandardNormal;
  bool export_failure_samples = true;
};

struct SweepSpec {
  double from = 1e-5;
  double to = 0.3;
  std::size_t count = 40;
};

struct RunConfig {
  std::string name;
  std::vector<InputSpec> inputs;
  std::optional<Matrix> correlation;
  bool repair_nearest_pd = false;
  LsfSpec lsf;
  std::optional<LogLinearSpec> lognormal_linear;
  std::optional<SafetySpec> safety;
  std::optional<DesignSpec> design;
  Method method = Method::Analytic;
  SamplingSpec sampling;
  std::uint64_t seed = 1;
  std::size_t grid_points = 512;
  double grid_tail = 1e-6;
  std::optional<SweepSpec> sweep;
  std::string outputs = "out";
  /// Advisory notes from validation (e.g. fields the chosen method ignores).
  std::vector<std::string> warnings;
  /// Parsed document with overrides applied, serialized compactly.
  std::string source_json;
};

/// Command-line overrides applied on top of a parsed configuration.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> outputs;
  std::optional<Method> method;
  std::optional<std::size_t> threads;
};

/// Parses JSON text. Errors carry the offending field path.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::string& path);
void apply_overrides(RunConfig& config, const ConfigOverrides& overrides);

/// The configuration serialized back to canonical JSON (used for hashing).
std::string canonical_json(const RunConfig& config);

/// Joint model and limit state built from a configuration.
struct Model {
  std::vector<std::string> names;
  GaussianCopulaJoint joint;
  LimitState lsf;
  std::optional<LogLinearForm> log_linear;
};

Model build_model(const RunConfig& config);

/// Semantic checks across fields (names, correlation, method requirements).
/// Builds the model as part of the check; returns it.
Model validate_config(RunConfig& config);

}  // namespace relsens
