#include <cmath>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relsens/config.hpp"
#include "relsens/error.hpp"
#include "relsens/pipeline.hpp"
#include "relsens/special.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> method;
  std::optional<std::size_t> threads;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Override the random seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--method", o.method, "analytic | form | mc | subset")
      ->check(CLI::IsMember({"analytic", "form", "mc", "subset"}));
  cmd->add_option("--threads", o.threads, "Worker threads for sampling")->check(CLI::PositiveNumber);
}

relsens::RunConfig load(const std::string& path, const Overrides& o) {
  relsens::RunConfig config = relsens::load_config(path);
  relsens::ConfigOverrides ov;
  ov.seed = o.seed;
  ov.outputs = o.out;
  if (o.method) ov.method = relsens::method_from_string(*o.method);
  ov.threads = o.threads;
  relsens::apply_overrides(config, ov);
  return config;
}

void print_warnings(const relsens::RunConfig& config) {
  for (const auto& w : config.warnings) std::cerr << "warning: " << w << '\n';
}

void emit(const relsens::CommandOutput& out, const std::string& dir) {
  relsens::write_outputs(out, dir);
  for (const auto& line : out.summary) std::cout << line << '\n';
  std::cout << "wrote " << out.files.size() << " files to " << dir << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Value-of-information sensitivity for reliability decisions"};
  app.set_version_flag("--version", std::string(relsens::version()));
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;

  auto* validate = app.add_subcommand("validate", "Check a configuration file");
  validate->add_option("config", config_path, "Configuration file")->required();

  auto* run = app.add_subcommand("run", "Compute EVPPI and write reports");
  run->add_option("config", config_path, "Configuration file")->required();
  add_overrides(run, overrides);

  auto* sweep = app.add_subcommand("sweep", "EVPPI against the cost ratio c_r/c_f");
  sweep->add_option("config", config_path, "Configuration file")->required();
  add_overrides(sweep, overrides);
  std::vector<double> ratios;
  std::optional<double> ratio_from, ratio_to;
  std::optional<std::size_t> ratio_count;
  sweep->add_option("--ratios", ratios, "Explicit list of cost ratios")->delimiter(',');
  sweep->add_option("--from", ratio_from, "Smallest ratio of a log-spaced grid");
  sweep->add_option("--to", ratio_to, "Largest ratio of a log-spaced grid");
  sweep->add_option("--count", ratio_count, "Number of log-spaced ratios")->check(CLI::PositiveNumber);

  auto* curves = app.add_subcommand("form-curves", "EVPPI against the FORM alpha factor");
  std::vector<double> betas, pfs;
  double curve_ratio = 1e-3;
  std::string mode = "safety";
  std::string curves_out = "out";
  auto* beta_opt = curves->add_option("--beta", betas, "Reliability indices")->delimiter(',');
  auto* pf_opt = curves->add_option("--pf", pfs, "Failure probabilities (converted to beta)")->delimiter(',');
  beta_opt->excludes(pf_opt);
  curves->add_option("--ratio", curve_ratio, "Cost ratio c_r/c_f (safety mode)");
  curves->add_option("--mode", mode, "safety | design")->check(CLI::IsMember({"safety", "design"}));
  curves->add_option("--out", curves_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      relsens::RunConfig config = relsens::load_config(config_path);
      const relsens::Model model = relsens::validate_config(config);
      print_warnings(config);
      std::cout << config_path << ": valid (" << model.names.size() << " inputs, method "
                << relsens::to_string(config.method) << ")\n";
    } else if (run->parsed()) {
      relsens::RunConfig config = load(config_path, overrides);
      const relsens::Model model = relsens::validate_config(config);
      print_warnings(config);
      emit(relsens::cmd_run(config, model), config.outputs);
    } else if (sweep->parsed()) {
      relsens::RunConfig config = load(config_path, overrides);
      if (ratio_from || ratio_to || ratio_count) {
        if (!ratios.empty()) {
          throw relsens::Error(relsens::ErrorKind::Configuration, "--ratios excludes --from/--to/--count");
        }
        relsens::SweepSpec spec = config.sweep.value_or(relsens::SweepSpec{});
        if (ratio_from) spec.from = *ratio_from;
        if (ratio_to) spec.to = *ratio_to;
        if (ratio_count) spec.count = *ratio_count;
        if (!(spec.from > 0.0 && spec.to < 1.0 && spec.from <= spec.to)) {
          throw relsens::Error(relsens::ErrorKind::Configuration,
                               "sweep ratios must satisfy 0 < from <= to < 1");
        }
        config.sweep = spec;
      }
      const relsens::Model model = relsens::validate_config(config);
      print_warnings(config);
      emit(relsens::cmd_sweep(config, model, ratios), config.outputs);
    } else if (curves->parsed()) {
      for (double p : pfs) {
        if (!(p > 0.0 && p < 0.5)) {
          throw relsens::Error(relsens::ErrorKind::Configuration, "--pf values must lie in (0, 0.5)");
        }
        betas.push_back(-relsens::normal_inv_cdf(p));
      }
      const auto m = mode == "design" ? relsens::CurveMode::Design : relsens::CurveMode::Safety;
      emit(relsens::cmd_form_curves(betas, curve_ratio, m), curves_out);
    }
  } catch (const relsens::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return relsens::is_configuration_error(e.kind()) ? kExitConfig : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}
