#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmcds/mask.hpp"
#include "rmcds/types.hpp"

namespace rmcds {

/// The weight from the recovery theory: 1 / sqrt(n log n). Requires n >= 2.
double theorem_lambda(Index n);

struct SolverConfig {
  std::optional<double> lambda;  // default: theorem_lambda(n)
  std::optional<double> mu;      // default: n^2 / (4 ||P_O[Y]||_1)
  int max_iters = 20000;
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  std::uint64_t seed = 0;
  bool record_trace = false;  // keep the per-iteration objective series
};

struct RecoveryResult {
  Matrix L_star;
  Matrix S_star;  // supported on O, off-mask entries exactly zero
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  bool converged = false;
  double lambda = 0.0;  // weight actually used
  std::vector<double> objective_trace;

  std::string to_kv() const;
};

/// Singular value shrinkage: A max(S - tau, 0) B^T from the full SVD.
Matrix svt(const Matrix& x, double tau);

/// Entrywise sgn(x) max(|x| - tau, 0).
template <typename Derived>
Matrix soft_threshold(const Eigen::MatrixBase<Derived>& x, double tau) {
  return x.unaryExpr([tau](double v) {
    const double mag = std::abs(v) - tau;
    return mag > 0.0 ? (v > 0.0 ? mag : -mag) : 0.0;
  });
}

/// Alternating-direction splitting for
///   min ||L||_* + lambda ||S||_1  s.t.  P_O[Y] = P_O[L + S],
/// with the unobserved slack folded into the sparse block's proximal step.
/// Non-convergence is reported via converged=false, never thrown.
RecoveryResult solve_rmc(const Matrix& y_obs, const SamplingMask& mask,
                         const SolverConfig& config = {});

/// Independent primal-dual (proximal gradient on the saddle) solver for the
/// same program; used as a cross-algorithm agreement oracle in tests.
RecoveryResult solve_rmc_reference(const Matrix& y_obs, const SamplingMask& mask,
                                   const SolverConfig& config = {});

double objective_value(const Matrix& l, const Matrix& s, double lambda);

/// objective(L*, S*) - objective(L0, S0_bar). Values below -tolerance mean
/// the ground truth was not optimal for this instance.
double optimality_gap(const RecoveryResult& result, const Matrix& l0,
                      const Matrix& s0_bar, double lambda);

}  // namespace rmcds
