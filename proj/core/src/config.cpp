#include "relsens/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "relsens/error.hpp"
#include "relsens/expr.hpp"

namespace relsens {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::Configuration, path + ": " + msg);
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void allow_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) fail(path.empty() ? "$" : path, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      fail(join(path, k), "unknown field");
    }
  }
}

const json* find(const json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, const std::string& path, std::string_view key) {
  const json* v = find(obj, key);
  if (!v) fail(join(path, key), "required field is missing");
  return *v;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "expected a finite number");
  return d;
}

double positive(const json& v, const std::string& path) {
  const double d = number(v, path);
  if (!(d > 0.0)) fail(path, "must be positive");
  return d;
}

std::size_t count(const json& v, const std::string& path, std::size_t min_value) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path, "expected an integer");
  const auto i = v.get<long long>();
  if (i < static_cast<long long>(min_value)) {
    fail(path, "must be at least " + std::to_string(min_value));
  }
  return static_cast<std::size_t>(i);
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], index(path, i)));
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

InputSpec parse_input(const json& j, const std::string& path) {
  allow_keys(j, path, {"name", "distribution", "mean", "cov", "params", "unit", "description"});
  InputSpec in;
  in.name = string(require(j, path, "name"), join(path, "name"));
  if (!is_identifier(in.name)) fail(join(path, "name"), "'" + in.name + "' is not a valid identifier");
  if (in.name == kDesignSymbol) fail(join(path, "name"), "'a' is reserved for the design parameter");
  const std::string dist = string(require(j, path, "distribution"), join(path, "distribution"));
  try {
    in.kind = distribution_from_string(dist);
  } catch (const Error&) {
    fail(join(path, "distribution"), "unknown distribution '" + dist + "'");
  }
  const json* mean = find(j, "mean");
  const json* cov = find(j, "cov");
  const json* params = find(j, "params");
  if (params && (mean || cov)) fail(path, "give either mean/cov or params, not both");
  if (params) {
    const auto p = numbers(*params, join(path, "params"));
    if (p.size() != 2) fail(join(path, "params"), "expected two native parameters");
    in.params = std::array<double, 2>{p[0], p[1]};
  } else {
    if (!mean || !cov) fail(path, "mean and cov are required when params is absent");
    in.mean = number(*mean, join(path, "mean"));
    in.cov = positive(*cov, join(path, "cov"));
  }
  return in;
}

LsfSpec parse_lsf(const json& j, const std::string& path) {
  allow_keys(j, path, {"builtin", "expression", "inner"});
  LsfSpec spec;
  const json* b = find(j, "builtin");
  const json* e = find(j, "expression");
  if ((b != nullptr) == (e != nullptr)) fail(path, "give exactly one of 'builtin' or 'expression'");
  if (b) {
    spec.builtin = string(*b, join(path, "builtin"));
    const auto ids = LimitState::builtin_ids();
    if (std::find(ids.begin(), ids.end(), spec.builtin) == ids.end()) {
      fail(join(path, "builtin"), "unknown builtin '" + spec.builtin + "'");
    }
  } else {
    spec.expression = string(*e, join(path, "expression"));
    if (spec.expression.empty()) fail(join(path, "expression"), "must not be empty");
  }
  const json* inner = find(j, "inner");
  if (spec.builtin == "annex_affine") {
    if (!inner) fail(join(path, "inner"), "annex_affine needs an inner limit state");
    spec.inner = std::make_shared<const LsfSpec>(parse_lsf(*inner, join(path, "inner")));
  } else if (inner) {
    fail(join(path, "inner"), "only annex_affine takes an inner limit state");
  }
  return spec;
}

std::vector<double> parse_grid(const json& j, const std::string& path) {
  if (j.is_array()) return numbers(j, path);
  allow_keys(j, path, {"from", "to", "count"});
  const double lo = number(require(j, path, "from"), join(path, "from"));
  const double hi = number(require(j, path, "to"), join(path, "to"));
  const std::size_t m = count(require(j, path, "count"), join(path, "count"), 1);
  if (m > 1 && !(hi > lo)) fail(join(path, "to"), "must exceed 'from'");
  std::vector<double> g(m);
  for (std::size_t k = 0; k < m; ++k) {
    g[k] = m == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(m - 1);
  }
  if (m > 1) g.back() = hi;
  return g;
}

SafetySpec parse_safety(const json& j, const std::string& path) {
  allow_keys(j, path, {"c_f", "c_r", "ratios", "a"});
  SafetySpec s;
  s.c_f = positive(require(j, path, "c_f"), join(path, "c_f"));
  const json* cr = find(j, "c_r");
  const json* ratios = find(j, "ratios");
  if ((cr != nullptr) == (ratios != nullptr)) fail(path, "give exactly one of 'c_r' or 'ratios'");
  if (cr) {
    s.c_r = cr->is_array() ? numbers(*cr, join(path, "c_r"))
                           : std::vector<double>{number(*cr, join(path, "c_r"))};
  } else {
    const auto r = numbers(*ratios, join(path, "ratios"));
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!(r[i] > 0.0 && r[i] < 1.0)) fail(index(join(path, "ratios"), i), "ratio must lie in (0, 1)");
      s.c_r.push_back(r[i] * s.c_f);
    }
  }
  if (s.c_r.empty()) fail(path, "at least one replacement cost is required");
  for (std::size_t i = 0; i < s.c_r.size(); ++i) {
    if (!(s.c_r[i] > 0.0 && s.c_r[i] < s.c_f)) {
      fail(cr ? join(path, "c_r") : join(path, "ratios"), "need 0 < c_r < c_f");
    }
  }
  if (const json* a = find(j, "a")) s.a = number(*a, join(path, "a"));
  return s;
}

DesignSpec parse_design(const json& j, const std::string& path) {
  allow_keys(j, path, {"c_f", "cost", "grid"});
  DesignSpec d;
  d.c_f = positive(require(j, path, "c_f"), join(path, "c_f"));
  d.cost = string(require(j, path, "cost"), join(path, "cost"));
  d.grid = parse_grid(require(j, path, "grid"), join(path, "grid"));
  if (d.grid.empty()) fail(join(path, "grid"), "must not be empty");
  for (std::size_t k = 1; k < d.grid.size(); ++k) {
    if (!(d.grid[k] > d.grid[k - 1])) fail(join(path, "grid"), "must be strictly increasing");
  }
  return d;
}

KdeTransform kde_transform_from(const std::string& s, const std::string& path) {
  if (s == "standard_normal") return KdeTransform::MarginalStandardNormal;
  if (s == "identity") return KdeTransform::Identity;
  fail(path, "expected 'standard_normal' or 'identity'");
}

RunConfig parse_document(const json& doc) {
  allow_keys(doc, "", {"$schema", "name", "description", "inputs", "correlation", "nataf", "lsf",
                       "lognormal_linear", "decision", "method", "sampling", "seed", "grid", "sweep",
                       "outputs"});
  RunConfig c;
  if (const json* n = find(doc, "name")) c.name = string(*n, "name");

  const json& inputs = require(doc, "", "inputs");
  if (!inputs.is_array() || inputs.empty()) fail("inputs", "expected a nonempty array");
  for (std::size_t i = 0; i < inputs.size(); ++i) c.inputs.push_back(parse_input(inputs[i], index("inputs", i)));
  const std::size_t n = c.inputs.size();

  if (const json* corr = find(doc, "correlation")) {
    if (!corr->is_array() || corr->size() != n) {
      fail("correlation", "expected an " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    }
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = numbers((*corr)[i], index("correlation", i));
      if (row.size() != n) fail(index("correlation", i), "expected " + std::to_string(n) + " entries");
      for (std::size_t k = 0; k < n; ++k) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
      }
    }
    c.correlation = m;
  }
  if (const json* nataf = find(doc, "nataf")) {
    allow_keys(*nataf, "nataf", {"repair_nearest_pd"});
    if (const json* r = find(*nataf, "repair_nearest_pd")) {
      c.repair_nearest_pd = boolean(*r, "nataf.repair_nearest_pd");
    }
  }

  c.lsf = parse_lsf(require(doc, "", "lsf"), "lsf");

  if (const json* ll = find(doc, "lognormal_linear")) {
    allow_keys(*ll, "lognormal_linear", {"coefficients", "constant", "log_design"});
    LogLinearSpec s;
    s.coefficients = numbers(require(*ll, "lognormal_linear", "coefficients"), "lognormal_linear.coefficients");
    if (s.coefficients.size() != n) fail("lognormal_linear.coefficients", "expected one coefficient per input");
    if (const json* k = find(*ll, "constant")) s.constant = number(*k, "lognormal_linear.constant");
    if (const json* k = find(*ll, "log_design")) s.log_design = boolean(*k, "lognormal_linear.log_design");
    c.lognormal_linear = s;
  }

  const json& decision = require(doc, "", "decision");
  allow_keys(decision, "decision", {"safety", "design"});
  if (const json* s = find(decision, "safety")) c.safety = parse_safety(*s, "decision.safety");
  if (const json* d = find(decision, "design")) c.design = parse_design(*d, "decision.design");
  if (!c.safety && !c.design) fail("decision", "needs a 'safety' or a 'design' block");

  if (const json* m = find(doc, "method")) {
    const std::string name = string(*m, "method");
    try {
      c.method = method_from_string(name);
    } catch (const Error&) {
      fail("method", "expected one of analytic, form, mc, subset");
    }
  }

  if (const json* s = find(doc, "sampling")) {
    allow_keys(*s, "sampling", {"n", "n_per_level", "p0", "threads", "kde_transform", "export_failure_samples"});
    if (const json* v = find(*s, "n")) c.sampling.n = count(*v, "sampling.n", 1);
    if (const json* v = find(*s, "n_per_level")) c.sampling.n_per_level = count(*v, "sampling.n_per_level", 1);
    if (const json* v = find(*s, "p0")) {
      c.sampling.p0 = number(*v, "sampling.p0");
      if (!(c.sampling.p0 > 0.0 && c.sampling.p0 < 1.0)) fail("sampling.p0", "must lie in (0, 1)");
    }
    if (const json* v = find(*s, "threads")) c.sampling.threads = count(*v, "sampling.threads", 1);
    if (const json* v = find(*s, "kde_transform")) {
      c.sampling.kde_transform = kde_transform_from(string(*v, "sampling.kde_transform"), "sampling.kde_transform");
    }
    if (const json* v = find(*s, "export_failure_samples")) {
      c.sampling.export_failure_samples = boolean(*v, "sampling.export_failure_samples");
    }
  }

  if (const json* s = find(doc, "seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0)) {
      fail("seed", "expected a nonnegative integer");
    }
    c.seed = s->get<std::uint64_t>();
  }
  if (const json* g = find(doc, "grid")) {
    allow_keys(*g, "grid", {"points", "tail"});
    if (const json* v = find(*g, "points")) c.grid_points = count(*v, "grid.points", 2);
    if (const json* v = find(*g, "tail")) {
      c.grid_tail = number(*v, "grid.tail");
      if (!(c.grid_tail > 0.0 && c.grid_tail < 0.5)) fail("grid.tail", "must lie in (0, 0.5)");
    }
  }
  if (const json* s = find(doc, "sweep")) {
    allow_keys(*s, "sweep", {"from", "to", "count"});
    SweepSpec sw;
    if (const json* v = find(*s, "from")) sw.from = number(*v, "sweep.from");
    if (const json* v = find(*s, "to")) sw.to = number(*v, "sweep.to");
    if (const json* v = find(*s, "count")) sw.count = count(*v, "sweep.count", 1);
    if (!(sw.from > 0.0 && sw.from < 1.0)) fail("sweep.from", "ratio must lie in (0, 1)");
    if (!(sw.to > 0.0 && sw.to < 1.0)) fail("sweep.to", "ratio must lie in (0, 1)");
    if (sw.count > 1 && !(sw.to > sw.from)) fail("sweep.to", "must exceed 'from'");
    c.sweep = sw;
  }
  if (const json* o = find(doc, "outputs")) c.outputs = string(*o, "outputs");
  c.source_json = doc.dump();
  return c;
}

LimitState build_lsf(const LsfSpec& spec, const std::vector<std::string>& names) {
  if (!spec.expression.empty()) return LimitState::expression(spec.expression, names);
  if (spec.builtin == "annex_affine") return LimitState::annex_affine(build_lsf(*spec.inner, names));
  LimitState ls = LimitState::builtin(spec.builtin);
  if (ls.input_names() != names) {
    std::string expected;
    for (const auto& nm : ls.input_names()) expected += (expected.empty() ? "" : ", ") + nm;
    throw Error(ErrorKind::Configuration,
                "lsf.builtin: '" + spec.builtin + "' expects inputs [" + expected + "] in that order");
  }
  return ls;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::Analytic: return "analytic";
    case Method::Form: return "form";
    case Method::Mc: return "mc";
    case Method::Subset: return "subset";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  if (name == "analytic") return Method::Analytic;
  if (name == "form") return Method::Form;
  if (name == "mc") return Method::Mc;
  if (name == "subset") return Method::Subset;
  throw Error(ErrorKind::Configuration, "unknown method '" + std::string(name) + "'");
}

RunConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Configuration, std::string("malformed JSON: ") + e.what());
  }
  return parse_document(doc);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Configuration, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_overrides(RunConfig& config, const ConfigOverrides& overrides) {
  json doc = json::parse(config.source_json);
  if (overrides.seed) {
    config.seed = *overrides.seed;
    doc["seed"] = *overrides.seed;
  }
  if (overrides.outputs) {
    config.outputs = *overrides.outputs;
    doc["outputs"] = *overrides.outputs;
  }
  if (overrides.method) {
    config.method = *overrides.method;
    doc["method"] = std::string(to_string(*overrides.method));
  }
  if (overrides.threads) {
    if (*overrides.threads < 1) throw Error(ErrorKind::Configuration, "--threads must be at least 1");
    config.sampling.threads = *overrides.threads;
    doc["sampling"]["threads"] = *overrides.threads;
  }
  config.source_json = doc.dump();
}

std::string canonical_json(const RunConfig& config) { return config.source_json; }

Model build_model(const RunConfig& config) {
  std::vector<std::string> names;
  std::vector<Marginal> marginals;
  for (std::size_t i = 0; i < config.inputs.size(); ++i) {
    const InputSpec& in = config.inputs[i];
    names.push_back(in.name);
    try {
      if (in.params) {
        const auto [p0, p1] = *in.params;
        switch (in.kind) {
          case Distribution::Normal: marginals.push_back(Marginal::normal(p0, p1)); break;
          case Distribution::Lognormal: marginals.push_back(Marginal::lognormal(p0, p1)); break;
          case Distribution::Gumbel: marginals.push_back(Marginal::gumbel(p0, p1)); break;
          case Distribution::Weibull: marginals.push_back(Marginal::weibull(p0, p1)); break;
        }
      } else {
        marginals.push_back(Marginal::from_moments(in.kind, *in.mean, *in.cov));
      }
    } catch (const Error& e) {
      const ErrorKind kind = e.kind() == ErrorKind::InvalidArgument ? ErrorKind::Configuration : e.kind();
      throw Error(kind, "inputs[" + std::to_string(i) + "] (" + in.name + "): " + e.detail());
    }
  }
  const std::size_t n = names.size();
  CorrelationMatrix r = CorrelationMatrix::identity(n);
  if (config.correlation) {
    try {
      r = CorrelationMatrix(*config.correlation);
    } catch (const Error& e) {
      throw Error(e.kind(), "correlation: " + e.detail());
    }
  }
  NatafOptions opts;
  opts.repair_nearest_pd = config.repair_nearest_pd;
  GaussianCopulaJoint joint(std::move(marginals), r, opts);
  LimitState lsf = build_lsf(config.lsf, names);
  Model model{std::move(names), std::move(joint), std::move(lsf), std::nullopt};
  if (config.lognormal_linear) {
    const LogLinearSpec& s = *config.lognormal_linear;
    model.log_linear.emplace(LogLinearForm{s.coefficients, s.constant, s.log_design});
  } else {
    model.log_linear = model.lsf.log_linear();
  }
  return model;
}

Model validate_config(RunConfig& config) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < config.inputs.size(); ++i) {
    if (!seen.insert(config.inputs[i].name).second) {
      throw Error(ErrorKind::Configuration,
                  "inputs[" + std::to_string(i) + "].name: duplicate input name '" + config.inputs[i].name + "'");
    }
  }
  Model model = build_model(config);
  const bool design_lsf = model.lsf.has_design_param();
  config.warnings.clear();

  if (config.safety) {
    if (design_lsf && !config.safety->a) {
      throw Error(ErrorKind::DesignParameter,
                  "decision.safety.a: the limit state has a design parameter; give the design value to assess");
    }
    if (!design_lsf && config.safety->a) {
      throw Error(ErrorKind::DesignParameter,
                  "decision.safety.a: the limit state has no design parameter");
    }
  }
  if (config.design) {
    if (!design_lsf) {
      throw Error(ErrorKind::DesignParameter,
                  "decision.design: the limit state does not use the design parameter 'a'");
    }
    Expr cost = [&] {
      try {
        return Expr::parse(config.design->cost);
      } catch (const Error& e) {
        throw Error(e.kind(), "decision.design.cost: " + e.detail());
      }
    }();
    for (const auto& v : cost.variables()) {
      if (v != kDesignSymbol) {
        throw Error(ErrorKind::UnknownIdentifier,
                    "decision.design.cost: cost may only depend on 'a', found '" + v + "'");
      }
    }
  }

  const auto& marginals = model.joint.marginals();
  switch (config.method) {
    case Method::Analytic: {
      const bool all_lognormal = std::all_of(marginals.begin(), marginals.end(), [](const Marginal& m) {
        return m.kind() == Distribution::Lognormal;
      });
      if (!all_lognormal) {
        throw Error(ErrorKind::Configuration,
                    "method: 'analytic' needs lognormal inputs (use form, mc or subset)");
      }
      if (!model.log_linear) {
        throw Error(ErrorKind::Configuration,
                    "method: 'analytic' needs a log-linear limit state (builtin example1_* or a "
                    "'lognormal_linear' block)");
      }
      if (design_lsf && !model.log_linear->log_design) {
        throw Error(ErrorKind::Configuration,
                    "lognormal_linear.log_design: must be true for a design-parameter limit state");
      }
      break;
    }
    case Method::Form:
      if (!model.joint.is_independent()) {
        throw Error(ErrorKind::Configuration,
                    "method: 'form' conditional curves need independent inputs (use mc or subset)");
      }
      break;
    case Method::Mc:
      if (config.sampling.n < 1) throw Error(ErrorKind::Configuration, "sampling.n: required for method 'mc'");
      break;
    case Method::Subset: {
      const std::size_t n = config.sampling.n_per_level;
      const double seeds = static_cast<double>(n) * config.sampling.p0;
      const auto n_seeds = static_cast<std::size_t>(std::llround(seeds));
      if (n < 1) throw Error(ErrorKind::Configuration, "sampling.n_per_level: required for method 'subset'");
      if (seeds < 10.0 || n_seeds == 0 || n % n_seeds != 0) {
        throw Error(ErrorKind::Configuration,
                    "sampling: n_per_level * p0 must be an integer of at least 10 dividing n_per_level");
      }
      break;
    }
  }
  const bool sampling_method = config.method == Method::Mc || config.method == Method::Subset;
  if (!sampling_method && (config.sampling.n > 0 || config.sampling.n_per_level > 0)) {
    config.warnings.push_back("sampling settings are ignored by method '" +
                              std::string(to_string(config.method)) + "'");
  }
  if (config.lognormal_linear && config.method != Method::Analytic) {
    config.warnings.push_back("lognormal_linear block is only used by method 'analytic'");
  }
  return model;
}

}  // namespace relsens
