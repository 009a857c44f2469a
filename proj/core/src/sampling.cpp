#include "relsens/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "relsens/error.hpp"
#include "relsens/rng.hpp"
#include "relsens/special.hpp"

namespace relsens {
namespace {

constexpr std::uint64_t kResampleStream = 0xF00D'0000'0000'0000ull;
constexpr double kSpreadMin = 0.05;
constexpr double kSpreadMax = 5.0;

std::uint64_t chain_stream(std::size_t level, std::size_t chain) {
  return (static_cast<std::uint64_t>(level) << 40) | static_cast<std::uint64_t>(chain);
}

void check_design(const LimitState& lsf, const std::optional<double>& a) {
  if (lsf.has_design_param() != a.has_value()) {
    throw Error(ErrorKind::DesignParameter,
                a ? "limit state has no design parameter" : "design parameter value required");
  }
}

double eval_at(const LimitState& lsf, const Vector& x, double a, std::size_t index) {
  double g = 0.0;
  try {
    g = lsf(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), a);
  } catch (const Error& e) {
    throw Error(e.kind(), "sample " + std::to_string(index) + ": " + e.detail());
  }
  if (std::isnan(g)) {
    throw Error(ErrorKind::Evaluation, "sample " + std::to_string(index) + ": limit state is NaN");
  }
  return g;
}

struct Batch {
  std::size_t failures = 0;
  std::vector<double> rows;  // row-major failure samples
};

}  // namespace

McResult crude_mc(const GaussianCopulaJoint& joint, const LimitState& lsf, std::optional<double> a,
                  const McOptions& options) {
  if (options.n < 1) throw Error(ErrorKind::InvalidArgument, "crude MC needs n >= 1");
  if (options.batch_size < 1) throw Error(ErrorKind::InvalidArgument, "batch size must be positive");
  if (lsf.dims() != joint.dims()) {
    throw Error(ErrorKind::InvalidArgument, "limit state and joint model differ in dimension");
  }
  check_design(lsf, a);
  const double av = a.value_or(0.0);
  const std::size_t dims = joint.dims();
  const std::size_t n_batches = (options.n + options.batch_size - 1) / options.batch_size;
  std::vector<Batch> batches(n_batches);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    Vector u(static_cast<Eigen::Index>(dims));
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_batches) return;
      try {
        Philox rng(options.seed, b);
        const std::size_t first = b * options.batch_size;
        const std::size_t last = std::min(options.n, first + options.batch_size);
        Batch& out = batches[b];
        for (std::size_t k = first; k < last; ++k) {
          for (std::size_t d = 0; d < dims; ++d) u(static_cast<Eigen::Index>(d)) = rng.normal();
          const Vector x = joint.to_physical(u);
          if (eval_at(lsf, x, av, k) <= 0.0) {
            ++out.failures;
            if (options.keep_failure_samples) out.rows.insert(out.rows.end(), x.data(), x.data() + dims);
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_batches);
        return;
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, n_batches);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  McResult res;
  res.n = options.n;
  res.seed = options.seed;
  for (const auto& b : batches) res.n_failures += b.failures;
  res.pf_hat = static_cast<double>(res.n_failures) / static_cast<double>(res.n);
  const double half = 1.959963984540054 *
                      std::sqrt(res.pf_hat * (1.0 - res.pf_hat) / static_cast<double>(res.n));
  res.ci95_lower = std::max(0.0, res.pf_hat - half);
  res.ci95_upper = std::min(1.0, res.pf_hat + half);
  if (options.keep_failure_samples) {
    res.failure_samples.resize(static_cast<Eigen::Index>(res.n_failures),
                               static_cast<Eigen::Index>(dims));
    Eigen::Index row = 0;
    for (const auto& b : batches) {
      for (std::size_t k = 0; k < b.rows.size(); k += dims, ++row) {
        for (std::size_t d = 0; d < dims; ++d) {
          res.failure_samples(row, static_cast<Eigen::Index>(d)) = b.rows[k + d];
        }
      }
    }
  }
  return res;
}

SubsetResult subset_simulation(const GaussianCopulaJoint& joint, const LimitState& lsf,
                               std::optional<double> a, const SubsetOptions& options) {
  const std::size_t n = options.n_per_level;
  const double p0 = options.p0;
  if (!(p0 > 0.0 && p0 < 1.0)) throw Error(ErrorKind::InvalidArgument, "p0 must lie in (0, 1)");
  const auto n_seeds = static_cast<std::size_t>(std::llround(static_cast<double>(n) * p0));
  if (static_cast<double>(n) * p0 < 10.0 || n_seeds == 0 || n % n_seeds != 0) {
    throw Error(ErrorKind::InvalidArgument,
                "subset simulation needs n_per_level * p0 >= 10 and an integer chain length");
  }
  if (lsf.dims() != joint.dims()) {
    throw Error(ErrorKind::InvalidArgument, "limit state and joint model differ in dimension");
  }
  check_design(lsf, a);
  const double av = a.value_or(0.0);
  const auto dims = static_cast<Eigen::Index>(joint.dims());
  const std::size_t chain_length = n / n_seeds;

  SubsetResult res;
  res.seed = options.seed;
  std::size_t evals = 0;
  auto G = [&](const Vector& u) { return eval_at(lsf, joint.to_physical(u), av, evals++); };

  std::vector<Vector> us(n);
  std::vector<double> gs(n);
  {
    Philox rng(options.seed, chain_stream(0, 0));
    for (std::size_t k = 0; k < n; ++k) {
      us[k].resize(dims);
      for (Eigen::Index d = 0; d < dims; ++d) us[k](d) = rng.normal();
      gs[k] = G(us[k]);
    }
  }

  double pf = 1.0;
  double spread = 1.0;
  std::vector<double> history;
  for (std::size_t level = 0;; ++level) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return gs[i] < gs[j]; });
    const double threshold = 0.5 * (gs[order[n_seeds - 1]] + gs[order[n_seeds]]);

    if (threshold <= 0.0) {
      std::size_t fails = 0;
      for (double g : gs) fails += g <= 0.0 ? 1 : 0;
      const double p = static_cast<double>(fails) / static_cast<double>(n);
      res.levels.push_back({0.0, p, res.levels.empty() ? 0.0 : res.levels.back().acceptance_rate, spread});
      pf *= p;
      res.last_level_samples.resize(static_cast<Eigen::Index>(fails), dims);
      Eigen::Index row = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (gs[k] <= 0.0) res.last_level_samples.row(row++) = joint.to_physical(us[k]).transpose();
      }
      break;
    }
    history.push_back(threshold);
    if (history.size() > 3 && threshold >= history[history.size() - 4]) {
      throw Error(ErrorKind::Stagnation,
                  "intermediate threshold stopped decreasing at level " + std::to_string(level) +
                      " (threshold " + std::to_string(threshold) + ")");
    }
    if (level + 1 >= options.max_levels) {
      throw Error(ErrorKind::Stagnation,
                  "no failure level reached within " + std::to_string(options.max_levels) + " levels");
    }
    pf *= p0;

    std::vector<Vector> next_u;
    std::vector<double> next_g;
    next_u.reserve(n);
    next_g.reserve(n);
    // Chains are processed in groups; the spread is adapted after each group
    // towards the target acceptance rate.
    const std::size_t group = std::max<std::size_t>(1, n_seeds / 10);
    std::size_t accepted_total = 0;
    std::size_t proposed_total = 0;
    std::size_t accepted_group = 0;
    std::size_t proposed_group = 0;
    std::size_t groups_done = 0;
    for (std::size_t c = 0; c < n_seeds; ++c) {
      Philox rng(options.seed, chain_stream(level + 1, c));
      Vector cur = us[order[c]];
      double g_cur = gs[order[c]];
      next_u.push_back(cur);
      next_g.push_back(g_cur);
      for (std::size_t step = 1; step < chain_length; ++step) {
        Vector cand = cur;
        bool changed = false;
        for (Eigen::Index d = 0; d < dims; ++d) {
          const double xi = cur(d) + spread * rng.normal();
          const double log_ratio = 0.5 * (cur(d) * cur(d) - xi * xi);
          if (std::log(rng.uniform()) < log_ratio) {
            cand(d) = xi;
            changed = true;
          }
        }
        ++proposed_group;
        if (changed) {
          const double g_cand = G(cand);
          if (g_cand <= threshold) {
            cur = cand;
            g_cur = g_cand;
            ++accepted_group;
          }
        }
        next_u.push_back(cur);
        next_g.push_back(g_cur);
      }
      if ((c + 1) % group == 0 || c + 1 == n_seeds) {
        ++groups_done;
        if (proposed_group > 0) {
          const double rate = static_cast<double>(accepted_group) / static_cast<double>(proposed_group);
          spread *= std::exp((rate - options.target_acceptance) / std::sqrt(static_cast<double>(groups_done)));
          spread = std::clamp(spread, kSpreadMin, kSpreadMax);
        }
        accepted_total += accepted_group;
        proposed_total += proposed_group;
        accepted_group = proposed_group = 0;
      }
    }
    res.levels.push_back({threshold, p0,
                          proposed_total ? static_cast<double>(accepted_total) / static_cast<double>(proposed_total) : 0.0,
                          spread});
    us = std::move(next_u);
    gs = std::move(next_g);
  }
  res.pf_hat = pf;
  res.g_evaluations = evals;
  return res;
}

Matrix resample_weighted(const Matrix& samples, const std::vector<double>& weights, std::size_t m,
                         std::uint64_t seed) {
  if (static_cast<std::size_t>(samples.rows()) != weights.size()) {
    throw Error(ErrorKind::InvalidArgument, "one weight per sample row is required");
  }
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "resample size must be at least 1");
  std::vector<double> cumulative(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw Error(ErrorKind::InvalidWeights,
                  "weight " + std::to_string(i) + " is negative or not finite");
    }
    total += weights[i];
    cumulative[i] = total;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidWeights, "all weights are zero");
  std::size_t last_positive = weights.size() - 1;
  while (weights[last_positive] == 0.0) --last_positive;

  Philox rng(seed, kResampleStream);
  Matrix out(static_cast<Eigen::Index>(m), samples.cols());
  for (std::size_t k = 0; k < m; ++k) {
    const double target = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    auto idx = static_cast<std::size_t>(it - cumulative.begin());
    if (idx >= weights.size()) idx = last_positive;
    out.row(static_cast<Eigen::Index>(k)) = samples.row(static_cast<Eigen::Index>(idx));
  }
  return out;
}

}  // namespace relsens
