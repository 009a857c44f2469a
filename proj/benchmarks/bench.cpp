#include <benchmark/benchmark.h>

#include "relsens/conditional_pf.hpp"
#include "relsens/decision.hpp"
#include "relsens/form.hpp"
#include "relsens/problems.hpp"
#include "relsens/sampling.hpp"
#include "relsens/special.hpp"

using namespace relsens;

namespace {

void BM_BivariateNormal(benchmark::State& state) {
  double h = -2.4, k = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bivariate_normal_cdf(h, k, 0.45));
    h += 1e-9;
  }
}
BENCHMARK(BM_BivariateNormal);

void BM_BivariateNormalDeepTail(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(bivariate_normal_cdf(-0.77, -13.5, -0.2));
  }
}
BENCHMARK(BM_BivariateNormalDeepTail);

void BM_FormExample1(benchmark::State& state) {
  const Problem p = example1(false);
  for (auto _ : state) benchmark::DoNotOptimize(run_form(p.joint, p.lsf));
}
BENCHMARK(BM_FormExample1);

void BM_FormExample2(benchmark::State& state) {
  const Problem p = example2();
  for (auto _ : state) benchmark::DoNotOptimize(run_form(p.joint, p.lsf));
}
BENCHMARK(BM_FormExample2);

void BM_FormEvppiClosed(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(evppi_form_safety(2.44, 0.51, 1e8, 1e6, FormEvppiMethod::Closed));
  }
}
BENCHMARK(BM_FormEvppiClosed);

void BM_FormEvppiQuadrature(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(evppi_form_safety(2.44, 0.51, 1e8, 1e6, FormEvppiMethod::Quadrature));
  }
}
BENCHMARK(BM_FormEvppiQuadrature);

void BM_CrudeMc(benchmark::State& state) {
  const Problem p = example2();
  McOptions o;
  o.n = static_cast<std::size_t>(state.range(0));
  o.threads = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(crude_mc(p.joint, p.lsf, std::nullopt, o));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CrudeMc)->Args({100000, 1})->Args({100000, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_KdeCurve(benchmark::State& state) {
  const Problem p = example2();
  McOptions o;
  o.n = 200000;
  const McResult mc = crude_mc(p.joint, p.lsf, std::nullopt, o);
  std::vector<double> col(mc.failure_samples.rows());
  for (Eigen::Index k = 0; k < mc.failure_samples.rows(); ++k) col[static_cast<std::size_t>(k)] = mc.failure_samples(k, 0);
  const auto grid = quantile_grid(p.joint.marginal(0));
  KdeCurveOptions opts;
  opts.transform = state.range(0) == 0 ? KdeTransform::MarginalStandardNormal : KdeTransform::Identity;
  for (auto _ : state) {
    benchmark::DoNotOptimize(conditional_pf_from_failure_samples(p.joint, 0, col, mc.pf_hat, grid, opts));
  }
  state.SetLabel(std::to_string(col.size()) + " failure samples");
}
BENCHMARK(BM_KdeCurve)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_AnalyticSafetyEvppi(benchmark::State& state) {
  const auto prob = example1_lognormal(true);
  const Problem p = example1(true);
  const SafetyDecision d(1e8, 1e6);
  const auto grid = quantile_grid(p.joint.marginal(1));
  for (auto _ : state) {
    const auto curve = analytic_curve(prob, 1, grid);
    benchmark::DoNotOptimize(evppi_safety(curve, p.joint.marginal(1), d));
  }
}
BENCHMARK(BM_AnalyticSafetyEvppi)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
