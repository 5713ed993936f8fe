#include "rmcds/corruption.hpp"

#include <stdexcept>

#include "rmcds/rng.hpp"

namespace rmcds {

Matrix CorruptionModel::sparse_matrix() const {
  Matrix s = Matrix::Zero(n, n);
  const auto& pairs = support.pairs();
  for (std::size_t k = 0; k < pairs.size(); ++k)
    s(pairs[k].first, pairs[k].second) = signs[k] * magnitudes[k];
  return s;
}

CorruptionModel generate_corruption(Index n, double rho, double magnitude_scale,
                                    std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_corruption: n must be positive");
  if (rho < 0.0 || rho >= 1.0)
    throw std::invalid_argument("generate_corruption: rho must be in [0, 1)");
  if (!(magnitude_scale > 0.0))
    throw std::invalid_argument("generate_corruption: magnitude_scale must be positive");
  Rng rng(seed);
  std::vector<IndexSet::Pair> pairs;
  std::vector<double> signs, magnitudes;
  // Row-major scan; sign and magnitude drawn inline so the stream layout is
  // part of the determinism contract.
  for (std::int32_t i = 0; i < n; ++i) {
    for (std::int32_t j = 0; j < n; ++j) {
      if (rng.bernoulli(rho)) {
        pairs.emplace_back(i, j);
        signs.push_back(rng.rademacher());
        magnitudes.push_back(rng.uniform(magnitude_scale / 2.0, magnitude_scale));
      }
    }
  }
  CorruptionModel model;
  model.n = n;
  model.rho = rho;
  model.support = IndexSet::from_pairs(std::move(pairs));  // already sorted
  model.signs = std::move(signs);
  model.magnitudes = std::move(magnitudes);
  model.seed = seed;
  return model;
}

IndexSet corrupted_observed(const CorruptionModel& corruption, const SamplingMask& mask) {
  return mask.observed.set_intersection(corruption.support);
}

IndexSet clean_observed(const CorruptionModel& corruption, const SamplingMask& mask) {
  return mask.observed.set_difference(corruption.support);
}

Matrix observed_sparse(const CorruptionModel& corruption, const SamplingMask& mask) {
  if (corruption.n != mask.n)
    throw std::invalid_argument("observed_sparse: mask and corruption sizes differ");
  Matrix s = Matrix::Zero(corruption.n, corruption.n);
  const auto& pairs = corruption.support.pairs();
  for (std::size_t k = 0; k < pairs.size(); ++k)
    if (mask.observed.contains(pairs[k].first, pairs[k].second))
      s(pairs[k].first, pairs[k].second) = corruption.signs[k] * corruption.magnitudes[k];
  return s;
}

Matrix observed_sign(const CorruptionModel& corruption, const SamplingMask& mask) {
  if (corruption.n != mask.n)
    throw std::invalid_argument("observed_sign: mask and corruption sizes differ");
  Matrix s = Matrix::Zero(corruption.n, corruption.n);
  const auto& pairs = corruption.support.pairs();
  for (std::size_t k = 0; k < pairs.size(); ++k)
    if (mask.observed.contains(pairs[k].first, pairs[k].second))
      s(pairs[k].first, pairs[k].second) = corruption.signs[k];
  return s;
}

}  // namespace rmcds
