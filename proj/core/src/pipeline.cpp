#include "relsens/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "relsens/csv.hpp"
#include "relsens/error.hpp"
#include "relsens/form.hpp"
#include "relsens/lognormal_linear.hpp"
#include "relsens/sampling.hpp"
#include "relsens/special.hpp"

#ifndef RELSENS_VERSION
#define RELSENS_VERSION "0.0.0"
#endif

namespace relsens {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Runs fn as a named stage: records its wall time and prefixes any error
/// with the stage name (keeping the error kind, hence the exit code).
template <class Fn>
auto run_stage(std::vector<StageRecord>& stages, std::string name, Fn&& fn) {
  const auto start = Clock::now();
  stages.push_back({name, 0.0, {}});
  const std::size_t slot = stages.size() - 1;
  try {
    if constexpr (std::is_void_v<decltype(fn(stages[slot]))>) {
      fn(stages[slot]);
      stages[slot].seconds = seconds_since(start);
    } else {
      auto result = fn(stages[slot]);
      stages[slot].seconds = seconds_since(start);
      return result;
    }
  } catch (const Error& e) {
    throw Error(e.kind(), "stage '" + name + "': " + e.detail());
  }
}

std::vector<double> column(const Matrix& m, Eigen::Index j) {
  std::vector<double> v(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) v[static_cast<std::size_t>(r)] = m(r, j);
  return v;
}

std::vector<double> grid_for(const RunConfig& config, const Marginal& m) {
  return quantile_grid(m, config.grid_points, config.grid_tail);
}

CurveSet analytic_curves(const RunConfig& config, const Model& model, std::optional<double> a) {
  const LogLinearForm& ll = *model.log_linear;
  const auto problem =
      LognormalLinearProblem::from_joint(model.joint, ll.coeffs, ll.constant_for(a.value_or(1.0)));
  CurveSet set;
  set.pf = lognormal_linear_pf(problem);
  for (std::size_t i = 0; i < model.names.size(); ++i) {
    set.curves.push_back(analytic_curve(problem, i, grid_for(config, model.joint.marginal(i))));
  }
  return set;
}

CurveSet form_curves(const RunConfig& config, const Model& model, std::optional<double> a) {
  const FormResult form = run_form(model.joint, model.lsf, a);
  if (!form.converged) {
    throw Error(ErrorKind::DegenerateProblem,
                "FORM did not converge in " + std::to_string(form.iterations) + " iterations");
  }
  CurveSet set;
  set.pf = normal_cdf(-form.beta0);
  set.beta = form.beta0;
  set.alpha = form.alpha;
  for (std::size_t i = 0; i < model.names.size(); ++i) {
    set.curves.push_back(form_curve(model.joint, i, form, grid_for(config, model.joint.marginal(i))));
  }
  return set;
}

CurveSet kde_curves(const RunConfig& config, const Model& model, const Matrix& samples, double pf,
                    bool correlated) {
  if (samples.rows() < 20) {
    throw Error(ErrorKind::DegenerateSample,
                "only " + std::to_string(samples.rows()) +
                    " failure samples; at least 20 are needed for the density estimate");
  }
  CurveSet set;
  set.pf = pf;
  set.failure_samples = samples;
  KdeCurveOptions opts;
  opts.transform = config.sampling.kde_transform;
  opts.correlated = correlated;
  for (std::size_t i = 0; i < model.names.size(); ++i) {
    const auto values = column(samples, static_cast<Eigen::Index>(i));
    set.curves.push_back(conditional_pf_from_failure_samples(
        model.joint, i, values, pf, grid_for(config, model.joint.marginal(i)), opts));
  }
  return set;
}

SafetyOutcome assess_safety(const CurveSet& set, const Model& model, const SafetyDecision& d,
                            Method method) {
  EvppiReport report;
  report.method = std::string(to_string(method));
  EvppiDiagnostics& diag = report.diagnostics;
  diag.effective_sample_size = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < model.names.size(); ++i) {
    const ConditionalPfCurve& curve = set.curves[i];
    const QuadratureResult q = evppi_safety_quadrature(curve, model.joint.marginal(i), d);
    double absolute = q.value;
    double error = q.error_estimate;
    if (method == Method::Form) {
      // The closed form is exact for the linearized problem; the curve
      // quadrature only serves as a cross-check.
      absolute = evppi_form_safety(*set.beta, set.alpha(static_cast<Eigen::Index>(i)), d.c_f, d.c_r);
      error = std::fabs(absolute - q.value);
    }
    report.inputs.push_back({model.names[i], absolute, 0.0, std::nullopt});
    diag.quadrature_error = std::max(diag.quadrature_error, error);
    diag.clip_fraction = std::max(diag.clip_fraction, curve.clip_fraction);
    diag.n_failure_samples = std::max(diag.n_failure_samples, curve.n_failure_samples);
    if (curve.effective_sample_size > 0.0) {
      diag.effective_sample_size = std::min(diag.effective_sample_size, curve.effective_sample_size);
    }
  }
  if (!std::isfinite(diag.effective_sample_size)) diag.effective_sample_size = 0.0;
  const double evpi = evpi_safety(set.pf, d);
  report = relativize(normalize(std::move(report)), evpi);
  return {d, prior_action(set.pf, d), std::move(report)};
}

json report_json(const EvppiReport& r) {
  json inputs = json::array();
  for (const auto& in : r.inputs) {
    json e{{"name", in.name}, {"absolute", in.absolute}};
    e["normalized"] = r.normalized_defined ? json(in.normalized) : json(nullptr);
    if (in.relative) e["relative"] = *in.relative;
    inputs.push_back(std::move(e));
  }
  json out{{"method", r.method}, {"inputs", std::move(inputs)}, {"normalized_defined", r.normalized_defined}};
  if (r.evpi) out["evpi"] = *r.evpi;
  out["diagnostics"] = {{"n_failure_samples", r.diagnostics.n_failure_samples},
                        {"clip_fraction", r.diagnostics.clip_fraction},
                        {"quadrature_error", r.diagnostics.quadrature_error},
                        {"floored", r.diagnostics.floored},
                        {"effective_sample_size", r.diagnostics.effective_sample_size}};
  return out;
}

std::string execution_note(const RunConfig& config) {
  const bool sampling = config.method == Method::Mc || config.method == Method::Subset;
  if (!sampling) return "deterministic; no random numbers used";
  if (config.sampling.threads <= 1) return "sequential";
  return "parallel with " + std::to_string(config.sampling.threads) +
         " threads; per-batch random streams make results independent of the thread count";
}

/// Appends report.json (payload plus manifest) to `out`. The manifest lists
/// every other file with its size and SHA-256.
void finish_with_report(CommandOutput& out, json payload, const json& manifest_base,
                        const std::vector<StageRecord>& stages, Clock::time_point start) {
  json manifest = manifest_base;
  manifest["version"] = std::string(version());
  json st = json::array();
  for (const auto& s : stages) {
    json values = json::object();
    for (const auto& [k, v] : s.values) values[k] = v;
    st.push_back({{"name", s.name}, {"seconds", s.seconds}, {"diagnostics", std::move(values)}});
  }
  manifest["stages"] = std::move(st);
  json files = json::array();
  for (const auto& f : out.files) {
    files.push_back({{"name", f.name}, {"bytes", f.content.size()}, {"sha256", sha256_hex(f.content)}});
  }
  manifest["files"] = std::move(files);
  manifest["wall_time_seconds"] = seconds_since(start);
  payload["manifest"] = std::move(manifest);
  out.files.push_back({"report.json", payload.dump(2) + "\n"});
}

json manifest_for(const RunConfig& config) {
  json warnings = json::array();
  for (const auto& w : config.warnings) warnings.push_back(w);
  return {{"config_sha256", sha256_hex(canonical_json(config))},
          {"seed", config.seed},
          {"method", std::string(to_string(config.method))},
          {"threads", config.sampling.threads},
          {"execution", execution_note(config)},
          {"warnings", std::move(warnings)}};
}

std::string setting_label(double c_r) { return "c_r=" + format_double(c_r); }

}  // namespace

std::string_view version() noexcept { return RELSENS_VERSION; }

CurveSet compute_curves(const RunConfig& config, const Model& model, std::optional<double> a) {
  switch (config.method) {
    case Method::Analytic:
      if (!model.log_linear) {
        throw Error(ErrorKind::Configuration, "method 'analytic' needs a log-linear limit state");
      }
      return analytic_curves(config, model, a);
    case Method::Form:
      return form_curves(config, model, a);
    case Method::Mc: {
      McOptions opts;
      opts.n = config.sampling.n;
      opts.seed = config.seed;
      opts.threads = config.sampling.threads;
      const McResult mc = crude_mc(model.joint, model.lsf, a, opts);
      return kde_curves(config, model, mc.failure_samples, mc.pf_hat, false);
    }
    case Method::Subset: {
      SubsetOptions opts;
      opts.n_per_level = config.sampling.n_per_level;
      opts.p0 = config.sampling.p0;
      opts.seed = config.seed;
      const SubsetResult ss = subset_simulation(model.joint, model.lsf, a, opts);
      return kde_curves(config, model, ss.last_level_samples, ss.pf_hat, true);
    }
  }
  throw Error(ErrorKind::Configuration, "unknown method");
}

Analysis analyze(const RunConfig& config, const Model& model) {
  Analysis an;
  if (config.safety) {
    const SafetySpec& s = *config.safety;
    an.safety_curves = run_stage(an.stages, "safety-curves", [&](StageRecord& rec) {
      CurveSet set = compute_curves(config, model, s.a);
      rec.values.emplace_back("pf", set.pf);
      if (set.beta) rec.values.emplace_back("beta", *set.beta);
      if (set.failure_samples.rows() > 0) {
        rec.values.emplace_back("n_failure_samples", static_cast<double>(set.failure_samples.rows()));
      }
      return set;
    });
    run_stage(an.stages, "safety-evppi", [&](StageRecord& rec) {
      for (double c_r : s.c_r) {
        an.safety.push_back(assess_safety(an.safety_curves, model, SafetyDecision(s.c_f, c_r), config.method));
        rec.values.emplace_back("quadrature_error[" + setting_label(c_r) + "]",
                                an.safety.back().report.diagnostics.quadrature_error);
      }
    });
  }
  if (config.design) {
    const DesignSpec& ds = *config.design;
    const DesignDecision decision(ds.c_f, Expr::parse(ds.cost), ds.grid);
    std::vector<CurveSet> sets = run_stage(an.stages, "design-curves", [&](StageRecord& rec) {
      // Sampling methods reuse the same seed for every design value (common
      // random numbers), which keeps the posterior minimum smooth in a.
      std::vector<CurveSet> out;
      out.reserve(ds.grid.size());
      for (double a : ds.grid) out.push_back(compute_curves(config, model, a));
      rec.values.emplace_back("designs", static_cast<double>(ds.grid.size()));
      return out;
    });
    an.design = run_stage(an.stages, "design-evppi", [&](StageRecord& rec) {
      DesignOutcome outcome;
      for (const auto& set : sets) outcome.pf_per_design.push_back(set.pf);
      outcome.prior = prior_design(outcome.pf_per_design, decision);
      EvppiReport report;
      report.method = std::string(to_string(config.method));
      for (std::size_t i = 0; i < model.names.size(); ++i) {
        std::vector<ConditionalPfCurve> curves;
        curves.reserve(sets.size());
        for (const auto& set : sets) curves.push_back(set.curves[i]);
        const DesignEvppi e = evppi_design(curves, outcome.pf_per_design, decision, model.joint.marginal(i));
        report.inputs.push_back({model.names[i], e.value, 0.0, std::nullopt});
        if (e.floored) ++report.diagnostics.floored;
        rec.values.emplace_back("raw[" + model.names[i] + "]", e.raw);
      }
      outcome.report = normalize(std::move(report));
      rec.values.emplace_back("a_opt", outcome.prior.a_opt);
      rec.values.emplace_back("pf_a_opt", outcome.prior.pf);
      return outcome;
    });
  }
  return an;
}

CommandOutput cmd_run(const RunConfig& config, const Model& model) {
  const auto start = Clock::now();
  const Analysis an = analyze(config, model);
  CommandOutput out;

  CsvWriter table({"decision", "setting", "input", "absolute", "normalized", "relative"});
  json payload{{"name", config.name}, {"method", std::string(to_string(config.method))}};
  if (config.safety) {
    json safety = json::array();
    for (const auto& s : an.safety) {
      for (const auto& in : s.report.inputs) {
        table.field("safety").field(setting_label(s.decision.c_r)).field(in.name).field(in.absolute);
        if (s.report.normalized_defined) table.field(in.normalized); else table.field("");
        if (in.relative) table.field(*in.relative); else table.field("");
        table.end_row();
      }
      json e{{"c_f", s.decision.c_f}, {"c_r", s.decision.c_r}, {"ratio", s.decision.ratio()},
             {"pf", an.safety_curves.pf}, {"prior_action", std::string(to_string(s.prior))}};
      e["report"] = report_json(s.report);
      safety.push_back(std::move(e));
      out.summary.push_back("safety " + setting_label(s.decision.c_r) + ": pf " +
                            format_double(an.safety_curves.pf) + ", EVPI " +
                            format_double(s.report.evpi.value_or(0.0)));
    }
    payload["safety"] = std::move(safety);
  }
  if (an.design) {
    const auto& d = *an.design;
    for (const auto& in : d.report.inputs) {
      table.field("design").field("cost=" + config.design->cost).field(in.name).field(in.absolute);
      if (d.report.normalized_defined) table.field(in.normalized); else table.field("");
      table.field("").end_row();
    }
    json grid = json::array();
    for (double a : config.design->grid) grid.push_back(a);
    json pfs = json::array();
    for (double p : d.pf_per_design) pfs.push_back(p);
    payload["design"] = {{"c_f", config.design->c_f},
                         {"cost", config.design->cost},
                         {"grid", std::move(grid)},
                         {"pf_per_design", std::move(pfs)},
                         {"a_opt", d.prior.a_opt},
                         {"pf_a_opt", d.prior.pf},
                         {"expected_loss", d.prior.expected_loss},
                         {"report", report_json(d.report)}};
    out.summary.push_back("design: a_opt " + format_double(d.prior.a_opt) + ", pf(a_opt) " +
                          format_double(d.prior.pf));
  }
  out.files.push_back({"evppi_table.csv", table.str()});

  // Curves at the assessed state: the safety curves, or the prior-optimal
  // design when only a design block is present.
  const CurveSet* curves = config.safety ? &an.safety_curves : nullptr;
  CurveSet design_curves;
  if (!curves && an.design) {
    design_curves = compute_curves(config, model, an.design->prior.a_opt);
    curves = &design_curves;
  }
  for (std::size_t i = 0; i < model.names.size(); ++i) {
    const ConditionalPfCurve& c = curves->curves[i];
    CsvWriter w({"x", "pf", "density_prior", "density_conditional"});
    const bool has_density = c.density_prior.size() == c.grid.size();
    for (std::size_t k = 0; k < c.grid.size(); ++k) {
      w.field(c.grid[k]).field(c.pf_values[k]);
      if (has_density) w.field(c.density_prior[k]).field(c.density_conditional[k]);
      else w.field("").field("");
      w.end_row();
    }
    out.files.push_back({"pf_curve_" + model.names[i] + ".csv", w.str()});

    if (!an.safety.empty()) {
      std::vector<std::string> header{"x"};
      std::vector<std::vector<double>> cols;
      for (const auto& s : an.safety) {
        header.push_back(setting_label(s.decision.c_r));
        cols.push_back(cvppi_curve(c, s.decision));
      }
      CsvWriter cv(header);
      for (std::size_t k = 0; k < c.grid.size(); ++k) {
        cv.field(c.grid[k]);
        for (const auto& col : cols) cv.field(col[k]);
        cv.end_row();
      }
      out.files.push_back({"cvppi_" + model.names[i] + ".csv", cv.str()});
    }
  }
  if (config.sampling.export_failure_samples && curves->failure_samples.rows() > 0) {
    CsvWriter w(model.names);
    const Matrix& m = curves->failure_samples;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) w.field(m(r, j));
      w.end_row();
    }
    out.files.push_back({"failure_samples.csv", w.str()});
  }
  finish_with_report(out, std::move(payload), manifest_for(config), an.stages, start);
  return out;
}

CommandOutput cmd_sweep(const RunConfig& config, const Model& model, std::vector<double> ratios) {
  const auto start = Clock::now();
  if (!config.safety) {
    throw Error(ErrorKind::Configuration, "decision.safety: the sweep needs a safety decision block");
  }
  if (ratios.empty()) {
    const SweepSpec spec = config.sweep.value_or(SweepSpec{});
    ratios = log_grid(spec.from, spec.to, spec.count);
  }
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) {
      throw Error(ErrorKind::Configuration, "sweep ratio " + format_double(r) + " must lie in (0, 1)");
    }
  }
  std::vector<StageRecord> stages;
  const CurveSet set = run_stage(stages, "curves", [&](StageRecord& rec) {
    CurveSet s = compute_curves(config, model, config.safety->a);
    rec.values.emplace_back("pf", s.pf);
    return s;
  });
  std::vector<Marginal> marginals = model.joint.marginals();
  const std::vector<SweepRow> rows = run_stage(stages, "sweep", [&](StageRecord& rec) {
    rec.values.emplace_back("ratios", static_cast<double>(ratios.size()));
    if (config.method == Method::Form) {
      std::vector<SweepRow> out;
      for (double r : ratios) {
        const SafetyDecision d(config.safety->c_f, r * config.safety->c_f);
        out.push_back({r, assess_safety(set, model, d, config.method).report});
      }
      return out;
    }
    return threshold_sweep(set.curves, marginals, model.names, set.pf, config.safety->c_f, ratios,
                           std::string(to_string(config.method)));
  });

  std::vector<std::string> header{"ratio", "evpi"};
  for (const auto& n : model.names) {
    header.push_back(n + "_absolute");
    header.push_back(n + "_relative");
    header.push_back(n + "_normalized");
  }
  CsvWriter w(header);
  json peaks = json::object();
  json relative_peaks = json::object();
  for (std::size_t i = 0; i < model.names.size(); ++i) {
    std::size_t best = 0;
    std::size_t best_rel = 0;
    auto rel = [&](std::size_t k) { return rows[k].report.inputs[i].relative.value_or(0.0); };
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (rows[k].report.inputs[i].absolute > rows[best].report.inputs[i].absolute) best = k;
      if (rel(k) > rel(best_rel)) best_rel = k;
    }
    peaks[model.names[i]] = rows[best].ratio;
    relative_peaks[model.names[i]] = rows[best_rel].ratio;
  }
  for (const auto& row : rows) {
    w.field(row.ratio).field(row.report.evpi.value_or(0.0));
    for (const auto& in : row.report.inputs) {
      w.field(in.absolute);
      if (in.relative) w.field(*in.relative); else w.field("");
      if (row.report.normalized_defined) w.field(in.normalized); else w.field("");
    }
    w.end_row();
  }
  CommandOutput out;
  out.files.push_back({"sweep.csv", w.str()});
  out.summary.push_back("sweep: " + std::to_string(rows.size()) + " ratios, pf " + format_double(set.pf));
  json payload{{"name", config.name},
               {"method", std::string(to_string(config.method))},
               {"pf", set.pf},
               {"c_f", config.safety->c_f},
               {"peak_ratio_absolute", std::move(peaks)},
               {"peak_ratio_relative", std::move(relative_peaks)}};
  finish_with_report(out, std::move(payload), manifest_for(config), stages, start);
  return out;
}

CommandOutput cmd_form_curves(const std::vector<double>& betas, double ratio, CurveMode mode) {
  if (betas.empty()) throw Error(ErrorKind::Configuration, "form-curves: at least one beta is required");
  for (double b : betas) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw Error(ErrorKind::Configuration, "form-curves: beta " + format_double(b) + " must be positive");
    }
  }
  if (mode == CurveMode::Safety && !(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorKind::Configuration, "form-curves: ratio must lie in (0, 1)");
  }
  std::vector<std::string> header{"beta", "pf", "alpha", "alpha2", "evppi"};
  if (mode == CurveMode::Design) header.push_back("evppi_normalized");
  CsvWriter w(header);
  for (double beta : betas) {
    const double at_one = mode == CurveMode::Design ? evppi_form_design(beta, 1.0, 1.0) : 0.0;
    for (int k = 1; k <= 99; ++k) {
      const double alpha = k / 100.0;
      const double v = mode == CurveMode::Safety ? evppi_form_safety(beta, alpha, 1.0, ratio)
                                                 : evppi_form_design(beta, alpha, 1.0);
      w.field(beta).field(normal_cdf(-beta)).field(alpha).field(alpha * alpha).field(v);
      if (mode == CurveMode::Design) w.field(at_one > 0.0 ? v / at_one : 0.0);
      w.end_row();
    }
  }
  CommandOutput out;
  out.files.push_back({"curves.csv", w.str()});
  out.summary.push_back("form-curves: " + std::to_string(betas.size()) + " x 99 points");
  return out;
}

void write_outputs(const CommandOutput& out, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Configuration, "cannot create output directory '" + dir + "': " + ec.message());
  std::vector<fs::path> written;
  try {
    for (const auto& f : out.files) {
      const fs::path p = fs::path(dir) / f.name;
      std::ofstream os(p, std::ios::binary | std::ios::trunc);
      if (!os) throw Error(ErrorKind::Configuration, "cannot open '" + p.string() + "' for writing");
      written.push_back(p);
      os.write(f.content.data(), static_cast<std::streamsize>(f.content.size()));
      os.close();
      if (!os) throw Error(ErrorKind::Configuration, "failed writing '" + p.string() + "'");
    }
  } catch (...) {
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
}

std::vector<std::string> verify_manifest(const std::string& dir) {
  namespace fs = std::filesystem;
  auto slurp = [](const fs::path& p, std::string& out) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
  };
  std::string text;
  if (!slurp(fs::path(dir) / "report.json", text)) return {"report.json"};
  const json report = json::parse(text, nullptr, false);
  if (report.is_discarded() || !report.contains("manifest")) return {"report.json"};
  std::vector<std::string> bad;
  for (const auto& f : report["manifest"]["files"]) {
    const std::string name = f.at("name").get<std::string>();
    std::string content;
    if (!slurp(fs::path(dir) / name, content) || content.size() != f.at("bytes").get<std::size_t>() ||
        sha256_hex(content) != f.at("sha256").get<std::string>()) {
      bad.push_back(name);
    }
  }
  return bad;
}

}  // namespace relsens
