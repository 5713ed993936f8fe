#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmcds/index_set.hpp"
#include "rmcds/mask.hpp"
#include "rmcds/operator_norm.hpp"
#include "rmcds/projectors.hpp"
#include "rmcds/types.hpp"

namespace rmcds {

struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, double estimate)
      : std::runtime_error(what), norm_estimate(estimate) {}
  double norm_estimate;
};

/// Default number of golfing batches: ceil(5 log n).
int default_golfing_batches(Index n);

struct NeumannResult {
  Matrix value;           // sum_{i<=terms_used} (P_T P_Oc P_T)^i [X], in T
  double residual = 0.0;  // ||P_T P_O P_T[value] - X||_F
  int terms_used = 0;
};

/// Truncated Neumann series for the inverse of P_T P_O P_T on T. The input is
/// projected onto T on entry. Terms stop early once they fall below
/// 1e-10 times the first term; throws DivergenceError when the measured
/// ||P_T P_Oc P_T|| is not safely below one.
NeumannResult neumann_tangent_inverse(const TangentSpace& t, const SamplingMask& mask,
                                      const Matrix& x, int terms = 500);

/// Projection onto the sum space T + O^perp, computed as D + P_Oc[M - D]
/// with D the Neumann solve of P_T P_O[M].
Matrix project_sum_space(const TangentSpace& t, const SamplingMask& mask,
                         const Matrix& m, int terms = 500);

struct GolfingOptions {
  std::uint64_t seed = 0;
  bool measure_batch_deviation = false;  // per-batch operator norms (slow)
  OperatorNormOptions opnorm{};
};

struct GolfingDiagnostics {
  std::vector<double> d_norms;           // ||D_0||_F .. ||D_k||_F
  std::vector<double> batch_deviations;  // per-batch deviation, when measured
  double lambda_inf = 0.0;               // ||Lambda_k||_inf
  double perp_opnorm = 0.0;              // ||P_Tc[Lambda_k]||
  double eta = 0.0;                      // batch density 1 - rho^{1/k}
  int k = 0;
  bool diverged = false;                 // ||D_i||_F grew 3 steps in a row
};

struct GolfingCertificate {
  Matrix lambda_l;  // P_N[Lambda_k], supported on N
  GolfingDiagnostics diag;
};

/// Golfing-scheme construction of the low-rank certificate part: batches
/// M_i ~ Ber(eta) with eta = 1 - rho^{1/k}, recursion
///   D_i = P_T P_N[Lambda_i] - U V^T,
///   Lambda_i = Lambda_{i-1} - eta^{-1} P_O P_{M_i}[D_{i-1}].
GolfingCertificate golfing_certificate(const TangentSpace& t, const SamplingMask& mask,
                                       const IndexSet& w_support, double rho, int k,
                                       const GolfingOptions& opts = {});

struct LeastSquaresDiagnostics {
  double v_residual = 0.0;     // ||P_V[Lambda_S] - lambda Sigma_bar||_F
  double perp_opnorm = 0.0;    // ||P_Tc[Lambda_S]||
  double n_inf = 0.0;          // ||P_N[Lambda_S]||_inf
  double series_norm = 0.0;    // measured ||P_V P_{T+Oc} P_V||
  double tail_estimate = 0.0;  // geometric tail after truncation
  int terms_used = 0;
};

struct LeastSquaresCertificate {
  Matrix lambda_s;  // supported on O
  LeastSquaresDiagnostics diag;
};

/// Sparse certificate part
///   Lambda_S = lambda (I - P_{T+Oc}) sum_i (P_V P_{T+Oc} P_V)^i [Sigma_bar],
/// evaluated with the truncated series; throws DivergenceError when the
/// series norm reaches one.
LeastSquaresCertificate least_squares_certificate(const TangentSpace& t,
                                                  const SamplingMask& mask,
                                                  const IndexSet& v_set,
                                                  const Matrix& sigma_bar, double lambda,
                                                  int terms = 500);

struct KKTReport {
  double t_fro = 0.0;     // ||P_T[Lambda] - U V^T||_F
  double t_perp_op = 0.0; // ||P_Tc[Lambda]||
  double v_exact = 0.0;   // ||P_V[Lambda] - lambda Sigma_bar||_F
  double n_inf = 0.0;     // ||P_N[Lambda]||_inf
  double thr_t_fro = 0.0;     // 1/n^2
  double thr_t_perp = 0.5;
  double thr_v_exact = 0.0;   // 1e-6 * lambda (the equality is checked to tolerance)
  double thr_n_inf = 0.0;     // lambda / 2
  bool pass = false;

  std::string to_kv() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

/// Evaluates the relaxed dual-optimality margins of a candidate multiplier.
/// Requires Lambda supported on V-union-N (throws std::invalid_argument).
KKTReport verify_kkt(const Matrix& lambda_mat, const TangentSpace& t,
                     const Matrix& sigma_bar, const IndexSet& v_set,
                     const IndexSet& n_set, double lambda,
                     const OperatorNormOptions& opts = {});

struct CertificatePair {
  Matrix lambda_l;
  Matrix lambda_s;
  int k_golf = 0;
  double eta = 0.0;
  int neumann_terms = 0;
};

}  // namespace rmcds
