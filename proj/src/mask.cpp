#include "rmcds/mask.hpp"

#include <stdexcept>

#include "rmcds/matrix_io.hpp"
#include "rmcds/rng.hpp"

namespace rmcds {

namespace {
void check_n(Index n) {
  if (n < 1) throw std::invalid_argument("mask: n must be positive");
}
}  // namespace

SamplingMask generate_full_mask(Index n) {
  check_n(n);
  return SamplingMask{n, IndexSet::full_grid(n)};
}

SamplingMask generate_decimation_mask(Index n, int period) {
  check_n(n);
  if (period < 2) throw std::invalid_argument("decimation mask: period must be >= 2");
  std::vector<IndexSet::Pair> pairs;
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t j = 0; j < n; ++j)
      if ((i + j) % period != 0) pairs.emplace_back(i, j);
  return SamplingMask{n, IndexSet::from_pairs(std::move(pairs))};
}

SamplingMask generate_block_mask(Index n, Index block) {
  check_n(n);
  if (block >= n) throw std::invalid_argument("block mask: block must be < n");
  if (block < 0) throw std::invalid_argument("block mask: block must be >= 0");
  std::vector<IndexSet::Pair> pairs;
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t j = 0; j < n; ++j)
      if (i >= block || j >= block) pairs.emplace_back(i, j);
  return SamplingMask{n, IndexSet::from_pairs(std::move(pairs))};
}

SamplingMask generate_bernoulli_mask(Index n, double rate, std::uint64_t seed) {
  check_n(n);
  if (!(rate > 0.0) || rate > 1.0)
    throw std::invalid_argument("bernoulli mask: rate must be in (0, 1]");
  Rng rng(seed);
  std::vector<IndexSet::Pair> pairs;
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t j = 0; j < n; ++j)
      if (rng.bernoulli(rate)) pairs.emplace_back(i, j);
  return SamplingMask{n, IndexSet::from_pairs(std::move(pairs))};
}

SamplingMask generate_mask(Index n, const MaskSpec& spec) {
  switch (spec.kind) {
    case MaskKind::Full:
      return generate_full_mask(n);
    case MaskKind::Decimation:
      return generate_decimation_mask(n, spec.period);
    case MaskKind::Block:
      return generate_block_mask(n, spec.block);
    case MaskKind::Bernoulli:
      return generate_bernoulli_mask(n, spec.rate, spec.seed);
    case MaskKind::FromFile: {
      SamplingMask mask = read_mask(spec.path);
      if (n > 0 && mask.n != n)
        throw std::invalid_argument("mask file size does not match requested n");
      return mask;
    }
  }
  throw std::invalid_argument("unknown mask kind");
}

MaskSpec parse_mask_spec(const std::string& text) {
  MaskSpec spec;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "full") {
    spec.kind = MaskKind::Full;
  } else if (kind == "decimation") {
    spec.kind = MaskKind::Decimation;
    if (arg.empty()) throw std::invalid_argument("decimation mask needs a period, e.g. decimation:3");
    spec.period = std::stoi(arg);
  } else if (kind == "block") {
    spec.kind = MaskKind::Block;
    if (arg.empty()) throw std::invalid_argument("block mask needs a size, e.g. block:4");
    spec.block = std::stol(arg);
  } else if (kind == "bernoulli") {
    spec.kind = MaskKind::Bernoulli;
  } else if (kind == "file") {
    spec.kind = MaskKind::FromFile;
    if (arg.empty()) throw std::invalid_argument("file mask needs a path, e.g. file:mask.txt");
    spec.path = arg;
  } else {
    throw std::invalid_argument("unknown mask kind: " + kind);
  }
  return spec;
}

std::string mask_kind_name(MaskKind kind) {
  switch (kind) {
    case MaskKind::Full: return "full";
    case MaskKind::Decimation: return "decimation";
    case MaskKind::Block: return "block";
    case MaskKind::Bernoulli: return "bernoulli";
    case MaskKind::FromFile: return "file";
  }
  return "unknown";
}

}  // namespace rmcds
