#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "relsens/joint.hpp"
#include "relsens/limit_state.hpp"

namespace relsens {

struct McOptions {
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  /// Worker threads; results do not depend on this value.
  std::size_t threads = 1;
  std::size_t batch_size = 8192;
  bool keep_failure_samples = true;
};

struct McResult {
  double pf_hat = 0.0;
  std::size_t n = 0;
  std::size_t n_failures = 0;
  double ci95_lower = 0.0;
  double ci95_upper = 0.0;
  /// Physical-space rows with g <= 0, in sample order.
  Matrix failure_samples;
  std::uint64_t seed = 0;
};

McResult crude_mc(const GaussianCopulaJoint& joint, const LimitState& lsf, std::optional<double> a,
                  const McOptions& options);

struct SubsetOptions {
  std::size_t n_per_level = 1000;
  double p0 = 0.1;
  std::uint64_t seed = 1;
  std::size_t max_levels = 40;
  double target_acceptance = 0.44;
};

struct SubsetLevel {
  double threshold = 0.0;
  double conditional_probability = 0.0;
  double acceptance_rate = 0.0;
  double proposal_spread = 0.0;
};

struct SubsetResult {
  double pf_hat = 0.0;
  std::vector<SubsetLevel> levels;
  /// Physical-space failure samples from the final level. Rows come from
  /// Markov chains and are correlated.
  Matrix last_level_samples;
  bool correlated = true;
  std::size_t g_evaluations = 0;
  std::uint64_t seed = 0;
};

/// Subset simulation in standard normal space with component-wise modified
/// Metropolis sampling and an adaptive proposal spread.
SubsetResult subset_simulation(const GaussianCopulaJoint& joint, const LimitState& lsf,
                               std::optional<double> a, const SubsetOptions& options);

/// Multinomial resampling of rows with probability proportional to weight.
Matrix resample_weighted(const Matrix& samples, const std::vector<double>& weights, std::size_t m,
                         std::uint64_t seed);

}  // namespace relsens
