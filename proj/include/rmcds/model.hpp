#pragma once

#include <cstdint>

#include "rmcds/types.hpp"

namespace rmcds {

/// Ground-truth rank-r factorization L0 = U diag(sigma) V^T with orthonormal
/// U, V (n-by-r) and positive non-increasing singular values.
struct LowRankModel {
  Index n = 0;
  Index r = 0;
  Matrix U;      // n x r, orthonormal columns
  Vector sigma;  // r, descending, in [1, 2] for generated models
  Matrix V;      // n x r, orthonormal columns

  Matrix reconstruct() const { return U * sigma.asDiagonal() * V.transpose(); }
};

/// QR orthonormalization with a fixed sign convention: the first nonzero
/// entry of every column is made positive, so generation is reproducible.
Matrix orthonormalize_columns(const Matrix& a);

/// U, V are orthonormalizations of independent standard-Gaussian n-by-r
/// draws; sigma uniform in [1, 2], sorted descending. Pure in (n, r, seed).
LowRankModel generate_low_rank(Index n, Index r, std::uint64_t seed);

struct IncoherenceReport {
  double nu = 0.0;        // (n/r) * max squared row norm of U and V, in [1, n/r]
  double uv_inf = 0.0;    // max |(U V^T)_ij|
  bool passes_strong = false;  // uv_inf <= sqrt(nu r) / (n sqrt(log n))
};

IncoherenceReport incoherence(const LowRankModel& model);

}  // namespace rmcds
