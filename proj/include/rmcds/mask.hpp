#pragma once

#include <cstdint>
#include <string>

#include "rmcds/index_set.hpp"
#include "rmcds/types.hpp"

namespace rmcds {

/// Deterministic observation pattern over an n-by-n grid.
struct SamplingMask {
  Index n = 0;
  IndexSet observed;

  double rate() const {
    return n == 0 ? 0.0 : static_cast<double>(observed.size()) / (static_cast<double>(n) * n);
  }
};

SamplingMask generate_full_mask(Index n);

/// Keeps (i, j) iff (i + j) mod period != 0. Requires period >= 2.
SamplingMask generate_decimation_mask(Index n, int period);

/// Removes the block-by-block top-left corner. Requires block < n.
SamplingMask generate_block_mask(Index n, Index block);

/// Each position kept independently with probability `rate` under `seed`,
/// then frozen; the frozen realization is treated as a deterministic pattern.
SamplingMask generate_bernoulli_mask(Index n, double rate, std::uint64_t seed);

enum class MaskKind { Full, Decimation, Block, Bernoulli, FromFile };

struct MaskSpec {
  MaskKind kind = MaskKind::Full;
  int period = 2;              // decimation
  Index block = 1;             // block
  double rate = 0.5;           // bernoulli
  std::uint64_t seed = 0;      // bernoulli
  std::string path;            // from-file
};

SamplingMask generate_mask(Index n, const MaskSpec& spec);

/// Parses "full", "decimation:M", "block:B", "bernoulli" (rate/seed set
/// separately) or "file:PATH". Throws std::invalid_argument on bad syntax.
MaskSpec parse_mask_spec(const std::string& text);

std::string mask_kind_name(MaskKind kind);

}  // namespace rmcds
