#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relsens/conditional_pf.hpp"
#include "relsens/config.hpp"
#include "relsens/decision.hpp"

namespace relsens {

std::string_view version() noexcept;

struct StageRecord {
  std::string name;
  double seconds = 0.0;
  /// Free-form key/value diagnostics, serialized into the manifest.
  std::vector<std::pair<std::string, double>> values;
};

/// Conditional pF curves for every input at one design value.
struct CurveSet {
  double pf = 0.0;
  std::vector<ConditionalPfCurve> curves;
  /// Physical failure samples (mc and subset only).
  Matrix failure_samples;
  /// FORM index and directions (form only).
  std::optional<double> beta;
  Vector alpha;
};

/// Computes the curve set for the configured method at design value `a`.
CurveSet compute_curves(const RunConfig& config, const Model& model, std::optional<double> a);

struct SafetyOutcome {
  SafetyDecision decision;
  Action prior = Action::DoNothing;
  EvppiReport report;
};

struct DesignOutcome {
  PriorDesign prior;
  std::vector<double> pf_per_design;
  EvppiReport report;
};

struct Analysis {
  CurveSet safety_curves;
  std::vector<SafetyOutcome> safety;
  std::optional<DesignOutcome> design;
  std::vector<StageRecord> stages;
};

Analysis analyze(const RunConfig& config, const Model& model);

struct OutputFile {
  std::string name;
  std::string content;
};

/// Everything a command produces, held in memory until written.
struct CommandOutput {
  std::vector<OutputFile> files;
  /// Lines for the terminal summary.
  std::vector<std::string> summary;
};

CommandOutput cmd_run(const RunConfig& config, const Model& model);
/// Uses `ratios` when nonempty, else the config's sweep block, else the default sweep.
CommandOutput cmd_sweep(const RunConfig& config, const Model& model, std::vector<double> ratios);

enum class CurveMode { Safety, Design };

/// EVPPI against |alpha| in 0.01..0.99 for each beta, with c_F = 1.
CommandOutput cmd_form_curves(const std::vector<double>& betas, double ratio, CurveMode mode);

/// Writes every file into `dir` (created if needed). If any write fails, the
/// files already written are removed before the error propagates.
void write_outputs(const CommandOutput& out, const std::string& dir);

/// Re-reads report.json in `dir` and checks every listed file's size and
/// SHA-256. Returns the names of mismatching or missing files.
std::vector<std::string> verify_manifest(const std::string& dir);

}  // namespace relsens
