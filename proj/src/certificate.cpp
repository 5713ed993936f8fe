#include "rmcds/certificate.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rmcds/conditions.hpp"
#include "rmcds/matrix_io.hpp"
#include "rmcds/rng.hpp"

namespace rmcds {

namespace {

constexpr double kTermFloor = 1e-10;  // early-stop factor for series terms
constexpr double kGateMargin = 1e-6;  // "norm >= 1" gate in floating point

double measured_tangent_leak(const TangentSpace& t, const IndexSet& oc, Index n) {
  OperatorNormOptions opts;
  opts.tol = 1e-8;
  opts.max_iters = 1000;
  const MatrixOp op = [&](const Matrix& x) {
    return project_tangent(t, project_mask(oc, project_tangent(t, x)));
  };
  try {
    return operator_norm(op, n, opts);
  } catch (const ConvergenceError& e) {
    return e.last_estimate;
  }
}

struct SumSpaceContext {
  const TangentSpace& t;
  const SamplingMask& mask;
  IndexSet oc;
  double leak;  // measured ||P_T P_Oc P_T||
  int terms;

  SumSpaceContext(const TangentSpace& t_in, const SamplingMask& mask_in, int terms_in)
      : t(t_in), mask(mask_in), oc(mask_in.observed.complement(mask_in.n)),
        leak(measured_tangent_leak(t_in, oc, mask_in.n)), terms(terms_in) {
    if (leak >= 1.0 - kGateMargin)
      throw DivergenceError("Neumann series invalid: ||P_T P_Oc P_T|| at or above one",
                            leak);
  }
};

// Truncated sum of (P_T P_Oc P_T)^i applied to a tangent-space element.
Matrix neumann_apply(const SumSpaceContext& ctx, const Matrix& x_in, int* used = nullptr) {
  Matrix acc = x_in;
  Matrix cur = x_in;
  const double first = x_in.norm();
  int i = 0;
  for (; i < ctx.terms; ++i) {
    if (cur.norm() <= kTermFloor * first) break;
    cur = project_tangent(ctx.t, project_mask(ctx.oc, cur));
    acc += cur;
  }
  if (used) *used = i;
  return acc;
}

Matrix sum_space_apply(const SumSpaceContext& ctx, const Matrix& m) {
  const Matrix d = neumann_apply(ctx, project_tangent(ctx.t, project_mask(ctx.mask, m)));
  return d + project_mask_complement(ctx.mask, m - d);
}

}  // namespace

int default_golfing_batches(Index n) {
  return static_cast<int>(std::ceil(5.0 * std::log(static_cast<double>(n))));
}

NeumannResult neumann_tangent_inverse(const TangentSpace& t, const SamplingMask& mask,
                                      const Matrix& x, int terms) {
  if (terms < 0) throw std::invalid_argument("neumann_tangent_inverse: terms must be >= 0");
  SumSpaceContext ctx(t, mask, terms);
  const Matrix x_t = project_tangent(t, x);
  NeumannResult res;
  res.value = neumann_apply(ctx, x_t, &res.terms_used);
  res.residual =
      (project_tangent(t, project_mask(mask, res.value)) - x_t).norm();
  return res;
}

Matrix project_sum_space(const TangentSpace& t, const SamplingMask& mask, const Matrix& m,
                         int terms) {
  SumSpaceContext ctx(t, mask, terms);
  return sum_space_apply(ctx, m);
}

GolfingCertificate golfing_certificate(const TangentSpace& t, const SamplingMask& mask,
                                       const IndexSet& w_support, double rho, int k,
                                       const GolfingOptions& opts) {
  if (k < 1) throw std::invalid_argument("golfing_certificate: k must be >= 1");
  if (rho < 0.0 || rho >= 1.0)
    throw std::invalid_argument("golfing_certificate: rho must be in [0, 1)");
  const Index n = mask.n;
  const double eta = 1.0 - std::pow(rho, 1.0 / static_cast<double>(k));
  const IndexSet clean = mask.observed.set_difference(w_support);  // N

  const Matrix uvt = t.U * t.V.transpose();
  Matrix lambda_k = Matrix::Zero(n, n);
  Matrix d = -uvt;  // D_0 = P_T P_N[0] - U V^T

  GolfingDiagnostics diag;
  diag.eta = eta;
  diag.k = k;
  diag.d_norms.push_back(d.norm());

  int growth_streak = 0;
  for (int i = 1; i <= k; ++i) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(i)));
    std::vector<IndexSet::Pair> batch;
    for (std::int32_t a = 0; a < n; ++a)
      for (std::int32_t b = 0; b < n; ++b)
        if (rng.bernoulli(eta)) batch.emplace_back(a, b);
    const IndexSet m_i = IndexSet::from_pairs(std::move(batch));

    if (opts.measure_batch_deviation) {
      // The recursion contracts D by P_T - eta^{-1} P_T P_{N cap M_i} P_T.
      diag.batch_deviations.push_back(
          tangent_sampling_deviation(t, clean, m_i, eta, opts.opnorm));
    }

    lambda_k -= (1.0 / eta) * project_mask(mask.observed.set_intersection(m_i), d);
    d = project_tangent(t, project_mask(clean, lambda_k)) - uvt;

    const double dn = d.norm();
    growth_streak = dn > diag.d_norms.back() ? growth_streak + 1 : 0;
    if (growth_streak >= 3) diag.diverged = true;
    diag.d_norms.push_back(dn);
  }

  diag.lambda_inf = inf_norm(lambda_k);
  diag.perp_opnorm = spectral_norm(project_tangent_complement(t, lambda_k), opts.opnorm);

  GolfingCertificate cert;
  cert.lambda_l = project_mask(clean, lambda_k);
  cert.diag = std::move(diag);
  return cert;
}

LeastSquaresCertificate least_squares_certificate(const TangentSpace& t,
                                                  const SamplingMask& mask,
                                                  const IndexSet& v_set,
                                                  const Matrix& sigma_bar, double lambda,
                                                  int terms) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("least_squares_certificate: lambda must be positive");
  if (terms < 0)
    throw std::invalid_argument("least_squares_certificate: terms must be >= 0");
  if (sigma_bar.rows() != mask.n || sigma_bar.cols() != mask.n)
    throw std::invalid_argument("least_squares_certificate: sign matrix shape mismatch");
  for (Index i = 0; i < mask.n; ++i)
    for (Index j = 0; j < mask.n; ++j)
      if (sigma_bar(i, j) != 0.0 &&
          !v_set.contains(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)))
        throw std::invalid_argument(
            "least_squares_certificate: sign matrix not supported on V");

  SumSpaceContext ctx(t, mask, 500);
  const IndexSet clean = mask.observed.set_difference(v_set);  // N

  LeastSquaresCertificate cert;
  const MatrixOp series_op = [&](const Matrix& x) {
    return project_mask(v_set, sum_space_apply(ctx, project_mask(v_set, x)));
  };
  OperatorNormOptions series_opts;
  series_opts.tol = 1e-8;
  series_opts.max_iters = 1000;
  double series_norm = 0.0;
  try {
    series_norm = operator_norm(series_op, mask.n, series_opts);
  } catch (const ConvergenceError& e) {
    series_norm = e.last_estimate;
  }
  cert.diag.series_norm = series_norm;
  if (series_norm >= 1.0 - kGateMargin)
    throw DivergenceError(
        "least-squares series invalid: ||P_V P_{T+Oc} P_V|| at or above one", series_norm);

  Matrix sum = sigma_bar;
  Matrix cur = sigma_bar;
  const double first = sigma_bar.norm();
  int used = 0;
  for (int i = 1; i <= terms; ++i) {
    if (cur.norm() <= kTermFloor * first) break;
    cur = project_mask(v_set, sum_space_apply(ctx, cur));  // cur stays in V
    sum += cur;
    used = i;
  }
  cert.diag.terms_used = used;

  cert.lambda_s = lambda * (sum - sum_space_apply(ctx, sum));
  cert.diag.v_residual = (project_mask(v_set, cert.lambda_s) - lambda * sigma_bar).norm();
  cert.diag.perp_opnorm = spectral_norm(project_tangent_complement(t, cert.lambda_s));
  cert.diag.n_inf = inf_norm(project_mask(clean, cert.lambda_s));
  cert.diag.tail_estimate = series_norm < 1.0
                                ? lambda * first * std::pow(series_norm, used + 1) /
                                      (1.0 - series_norm)
                                : std::numeric_limits<double>::infinity();
  return cert;
}

KKTReport verify_kkt(const Matrix& lambda_mat, const TangentSpace& t,
                     const Matrix& sigma_bar, const IndexSet& v_set,
                     const IndexSet& n_set, double lambda,
                     const OperatorNormOptions& opts) {
  if (!(lambda > 0.0)) throw std::invalid_argument("verify_kkt: lambda must be positive");
  const Index n = t.n();
  if (lambda_mat.rows() != n || lambda_mat.cols() != n)
    throw std::invalid_argument("verify_kkt: multiplier shape mismatch");
  const IndexSet o_set = v_set.set_union(n_set);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (lambda_mat(i, j) != 0.0 &&
          !o_set.contains(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)))
        throw std::invalid_argument("verify_kkt: multiplier not supported on the mask");

  KKTReport rep;
  const double nn = static_cast<double>(n);
  rep.thr_t_fro = 1.0 / (nn * nn);
  rep.thr_t_perp = 0.5;
  rep.thr_v_exact = 1e-6 * lambda;
  rep.thr_n_inf = lambda / 2.0;

  rep.t_fro = (project_tangent(t, lambda_mat) - t.U * t.V.transpose()).norm();
  rep.t_perp_op = spectral_norm(project_tangent_complement(t, lambda_mat), opts);
  rep.v_exact = (project_mask(v_set, lambda_mat) - lambda * sigma_bar).norm();
  rep.n_inf = inf_norm(project_mask(n_set, lambda_mat));
  rep.pass = rep.t_fro < rep.thr_t_fro && rep.t_perp_op < rep.thr_t_perp &&
             rep.v_exact <= rep.thr_v_exact && rep.n_inf < rep.thr_n_inf;
  return rep;
}

std::string KKTReport::to_kv() const {
  std::ostringstream out;
  out << "t_fro=" << format_full(t_fro) << '\n'
      << "t_perp_op=" << format_full(t_perp_op) << '\n'
      << "v_exact=" << format_full(v_exact) << '\n'
      << "n_inf=" << format_full(n_inf) << '\n'
      << "thr_t_fro=" << format_full(thr_t_fro) << '\n'
      << "thr_t_perp=" << format_full(thr_t_perp) << '\n'
      << "thr_v_exact=" << format_full(thr_v_exact) << '\n'
      << "thr_n_inf=" << format_full(thr_n_inf) << '\n'
      << "pass=" << (pass ? "true" : "false") << '\n';
  return out.str();
}

std::string KKTReport::csv_header() {
  return "t_fro,t_perp_op,v_exact,n_inf,thr_t_fro,thr_t_perp,thr_v_exact,thr_n_inf,pass";
}

std::string KKTReport::to_csv_row() const {
  std::ostringstream out;
  out << format_full(t_fro) << ',' << format_full(t_perp_op) << ',' << format_full(v_exact)
      << ',' << format_full(n_inf) << ',' << format_full(thr_t_fro) << ','
      << format_full(thr_t_perp) << ',' << format_full(thr_v_exact) << ','
      << format_full(thr_n_inf) << ',' << (pass ? 1 : 0);
  return out.str();
}

}  // namespace rmcds
