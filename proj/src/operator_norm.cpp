#include "rmcds/operator_norm.hpp"

#include <cmath>

#include "rmcds/rng.hpp"

namespace rmcds {

namespace {

// Power iteration on a PSD map. Two accepted exits: the eigen-residual
// ||A[x] - mu x||_F falls below tol * mu, or the Rayleigh quotient moves by
// less than tol * mu twice in a row after a short warmup. Returns
// lambda_max(A); throws once max_iters is exhausted.
template <typename Apply>
double psd_top_eigenvalue(const Apply& apply, Index rows, Index cols,
                          const OperatorNormOptions& opts) {
  Rng rng(opts.seed);
  Matrix x(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) x(i, j) = rng.normal();
  double xn = x.norm();
  if (xn == 0.0) return 0.0;
  x /= xn;

  double mu = 0.0;
  double mu_prev = -1.0;
  int calm_steps = 0;
  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    Matrix y = apply(x);
    const double yn = y.norm();
    mu = (x.array() * y.array()).sum();  // <x, A x>, x unit
    if (yn <= 1e-300) return 0.0;        // numerically the zero map
    const double scale = std::max(std::abs(mu), 1e-30);
    if ((y - mu * x).norm() <= opts.tol * scale) return mu;
    if (iter > 10) {
      calm_steps = std::abs(mu - mu_prev) <= opts.tol * scale ? calm_steps + 1 : 0;
      if (calm_steps >= 2) return mu;
    }
    mu_prev = mu;
    x = y / yn;
  }
  throw ConvergenceError("operator norm power iteration did not converge",
                         std::sqrt(std::max(mu, 0.0)), opts.max_iters);
}

}  // namespace

double operator_norm(const MatrixOp& op, Index n, const OperatorNormOptions& opts) {
  // op is self-adjoint; iterating op∘op keeps indefinite spectra converging
  // to the squared spectral radius.
  const auto squared = [&op](const Matrix& x) { return op(op(x)); };
  const double mu = psd_top_eigenvalue(squared, n, n, opts);
  return std::sqrt(std::max(mu, 0.0));
}

double spectral_norm(const Matrix& m, const OperatorNormOptions& opts) {
  if (m.size() == 0) return 0.0;
  const auto gram = [&m](const Matrix& v) -> Matrix { return m.transpose() * (m * v); };
  const double mu = psd_top_eigenvalue(gram, m.cols(), Index{1}, opts);
  return std::sqrt(std::max(mu, 0.0));
}

}  // namespace rmcds
