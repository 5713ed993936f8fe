#pragma once

#include <cstdint>
#include <vector>

#include "rmcds/index_set.hpp"
#include "rmcds/mask.hpp"
#include "rmcds/types.hpp"

namespace rmcds {

/// Sparse corruption: support drawn Bernoulli(rho) over the full grid,
/// Rademacher signs, magnitudes uniform in [scale/2, scale].
struct CorruptionModel {
  Index n = 0;
  double rho = 0.0;
  IndexSet support;                // W
  std::vector<double> signs;       // +-1, aligned with support.pairs()
  std::vector<double> magnitudes;  // positive, aligned with support.pairs()
  std::uint64_t seed = 0;

  /// Dense S0: signs * magnitudes on the support, zero elsewhere.
  Matrix sparse_matrix() const;
};

CorruptionModel generate_corruption(Index n, double rho, double magnitude_scale,
                                    std::uint64_t seed);

/// Observed corrupted positions V = O intersect W.
IndexSet corrupted_observed(const CorruptionModel& corruption, const SamplingMask& mask);

/// Observed clean positions N = O minus W.
IndexSet clean_observed(const CorruptionModel& corruption, const SamplingMask& mask);

/// S0 restricted to the mask.
Matrix observed_sparse(const CorruptionModel& corruption, const SamplingMask& mask);

/// Entrywise sign of the observed sparse part: +-1 on V, zero elsewhere.
Matrix observed_sign(const CorruptionModel& corruption, const SamplingMask& mask);

}  // namespace rmcds
