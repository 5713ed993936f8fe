#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "rmcds/types.hpp"

namespace rmcds {

struct OperatorNormOptions {
  double tol = 1e-9;
  int max_iters = 500;
  std::uint64_t seed = 0x5eed5eedULL;
};

struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double estimate, int iterations)
      : std::runtime_error(what), last_estimate(estimate), iters(iterations) {}
  double last_estimate;
  int iters;
};

/// Linear map on n-by-n matrices.
using MatrixOp = std::function<Matrix(const Matrix&)>;

/// Largest singular value of a self-adjoint linear map on n-by-n matrices,
/// by power iteration on op composed with itself (handles indefinite maps).
/// Deterministic given the seed; throws ConvergenceError past max_iters.
double operator_norm(const MatrixOp& op, Index n, const OperatorNormOptions& opts = {});

/// Largest singular value of a concrete matrix via the same power-iteration
/// machinery (iterates v -> M^T M v).
double spectral_norm(const Matrix& m, const OperatorNormOptions& opts = {});

}  // namespace rmcds
