#include "rmcds/solver.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rmcds/matrix_io.hpp"
#include "rmcds/projectors.hpp"

namespace rmcds {

namespace {

void validate_config(const SolverConfig& config) {
  if (config.lambda && !(*config.lambda > 0.0))
    throw std::invalid_argument("solver: lambda must be positive");
  if (config.mu && !(*config.mu > 0.0))
    throw std::invalid_argument("solver: mu must be positive");
  if (!(config.primal_tol > 0.0) || !(config.dual_tol > 0.0))
    throw std::invalid_argument("solver: tolerances must be positive");
  if (config.max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
}

double nuclear_norm(const Matrix& x) {
  return Eigen::BDCSVD<Matrix>(x).singularValues().sum();
}

// Soft-threshold on the mask, copy elsewhere: the proximal step of
// lambda ||P_O[.]||_1 with the unobserved slack folded in.
Matrix masked_shrink(const Matrix& x, const IndexSet& observed, double tau) {
  Matrix out = x;
  for (const auto& [i, j] : observed.pairs()) {
    const double v = out(i, j);
    const double mag = std::abs(v) - tau;
    out(i, j) = mag > 0.0 ? (v > 0.0 ? mag : -mag) : 0.0;
  }
  return out;
}

RecoveryResult zero_result(Index n, double lambda) {
  RecoveryResult res;
  res.L_star = Matrix::Zero(n, n);
  res.S_star = Matrix::Zero(n, n);
  res.converged = true;
  res.lambda = lambda;
  return res;
}

}  // namespace

double theorem_lambda(Index n) {
  if (n < 2) throw std::invalid_argument("theorem_lambda: needs n >= 2");
  const double nn = static_cast<double>(n);
  return 1.0 / std::sqrt(nn * std::log(nn));
}

Matrix svt(const Matrix& x, double tau) {
  if (tau < 0.0) throw std::invalid_argument("svt: tau must be >= 0");
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw std::runtime_error("svt: SVD failed");
  Vector s = svd.singularValues();
  for (Index k = 0; k < s.size(); ++k) s(k) = std::max(s(k) - tau, 0.0);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

double objective_value(const Matrix& l, const Matrix& s, double lambda) {
  return nuclear_norm(l) + lambda * l1_norm(s);
}

double optimality_gap(const RecoveryResult& result, const Matrix& l0,
                      const Matrix& s0_bar, double lambda) {
  return objective_value(result.L_star, result.S_star, lambda) -
         objective_value(l0, s0_bar, lambda);
}

RecoveryResult solve_rmc(const Matrix& y_obs, const SamplingMask& mask,
                         const SolverConfig& config) {
  validate_config(config);
  if (mask.observed.empty()) throw std::invalid_argument("solve_rmc: empty mask");
  if (y_obs.rows() != mask.n || y_obs.cols() != mask.n)
    throw std::invalid_argument("solve_rmc: matrix shape does not match mask");

  const Index n = mask.n;
  const double lambda = config.lambda ? *config.lambda : theorem_lambda(n);
  const Matrix b = project_mask(mask, y_obs);
  const double b_norm = b.norm();
  if (b_norm == 0.0) return zero_result(n, lambda);

  const double mu = config.mu ? *config.mu
                              : static_cast<double>(n) * static_cast<double>(n) /
                                    (4.0 * l1_norm(b));

  // X2 carries the sparse part on the mask and the unobserved slack off it;
  // L + X2 = B is the full constraint.
  Matrix l_mat = Matrix::Zero(n, n);
  Matrix x2 = Matrix::Zero(n, n);
  Matrix dual = Matrix::Zero(n, n);

  RecoveryResult res;
  res.lambda = lambda;
  if (config.record_trace) res.objective_trace.reserve(config.max_iters);

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    l_mat = svt(b - x2 - dual / mu, 1.0 / mu);
    const Matrix x2_prev = x2;
    x2 = masked_shrink(b - l_mat - dual / mu, mask.observed, lambda / mu);
    const Matrix residual = l_mat + x2 - b;
    dual += mu * residual;

    res.iterations = iter;
    res.primal_residual = residual.norm();
    res.dual_residual = mu * (x2 - x2_prev).norm();
    if (config.record_trace)
      res.objective_trace.push_back(
          objective_value(l_mat, project_mask(mask, x2), lambda));

    if (res.primal_residual <= config.primal_tol * (1.0 + b_norm) &&
        res.dual_residual <= config.dual_tol * (1.0 + dual.norm())) {
      res.converged = true;
      break;
    }
  }

  res.L_star = std::move(l_mat);
  res.S_star = project_mask(mask, x2);  // off-mask entries exactly zero
  res.objective = objective_value(res.L_star, res.S_star, lambda);
  return res;
}

RecoveryResult solve_rmc_reference(const Matrix& y_obs, const SamplingMask& mask,
                                   const SolverConfig& config) {
  validate_config(config);
  if (mask.observed.empty()) throw std::invalid_argument("solve_rmc_reference: empty mask");
  if (y_obs.rows() != mask.n || y_obs.cols() != mask.n)
    throw std::invalid_argument("solve_rmc_reference: matrix shape does not match mask");

  const Index n = mask.n;
  const double lambda = config.lambda ? *config.lambda : theorem_lambda(n);
  const Matrix b = project_mask(mask, y_obs);
  const double b_norm = b.norm();
  if (b_norm == 0.0) return zero_result(n, lambda);

  // Primal-dual iteration on the saddle form; the coupling map
  // (L, S) -> P_O[L + S] has norm sqrt(2), so tau * sigma * 2 < 1.
  const double step = 0.7;
  const double tau = step, sigma = step;

  Matrix l_mat = Matrix::Zero(n, n), s_mat = Matrix::Zero(n, n);
  Matrix l_bar = l_mat, s_bar = s_mat;
  Matrix dual = Matrix::Zero(n, n);

  RecoveryResult res;
  res.lambda = lambda;
  if (config.record_trace) res.objective_trace.reserve(config.max_iters);

  double prev_obj = 0.0;
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    dual += sigma * (project_mask(mask, l_bar + s_bar) - b);
    const Matrix l_new = svt(l_mat - tau * dual, tau);
    const Matrix s_new = masked_shrink(project_mask(mask, s_mat - tau * dual),
                                       mask.observed, tau * lambda);
    l_bar = 2.0 * l_new - l_mat;
    s_bar = 2.0 * s_new - s_mat;
    l_mat = l_new;
    s_mat = s_new;

    res.iterations = iter;
    res.primal_residual = (project_mask(mask, l_mat + s_mat) - b).norm();
    const double obj = objective_value(l_mat, s_mat, lambda);
    if (config.record_trace) res.objective_trace.push_back(obj);

    if (iter % 50 == 0) {
      if (res.primal_residual <= config.primal_tol * (1.0 + b_norm) &&
          std::abs(obj - prev_obj) <= config.dual_tol * (1.0 + std::abs(obj))) {
        res.converged = true;
        break;
      }
      prev_obj = obj;
    }
  }

  res.L_star = std::move(l_mat);
  res.S_star = std::move(s_mat);  // masked_shrink keeps it supported on O
  res.objective = objective_value(res.L_star, res.S_star, lambda);
  return res;
}

std::string RecoveryResult::to_kv() const {
  std::ostringstream out;
  out << "iterations=" << iterations << '\n'
      << "primal_residual=" << format_full(primal_residual) << '\n'
      << "dual_residual=" << format_full(dual_residual) << '\n'
      << "objective=" << format_full(objective) << '\n'
      << "lambda=" << format_full(lambda) << '\n'
      << "converged=" << (converged ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace rmcds
