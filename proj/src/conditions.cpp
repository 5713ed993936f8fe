#include "rmcds/conditions.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rmcds/matrix_io.hpp"
#include "rmcds/rng.hpp"

namespace rmcds {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix random_tangent_element(const TangentSpace& t, Rng& rng) {
  Matrix g(t.n(), t.n());
  for (Index i = 0; i < t.n(); ++i)
    for (Index j = 0; j < t.n(); ++j) g(i, j) = rng.normal();
  return project_tangent(t, g);
}

Matrix sign_pattern(const Matrix& x) {
  return x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}
}  // namespace

double gamma_isomeric(const TangentSpace& t, const SamplingMask& mask,
                      const OperatorNormOptions& opts) {
  const IndexSet oc = mask.observed.complement(mask.n);
  const MatrixOp op = [&](const Matrix& x) {
    return project_tangent(t, project_mask(oc, project_tangent(t, x)));
  };
  return 1.0 - operator_norm(op, mask.n, opts) / 2.0;
}

double raiip_estimate(const TangentSpace& t, const SamplingMask& mask,
                      const RaiipOptions& opts) {
  if (opts.restarts < 1) throw std::invalid_argument("raiip_estimate: restarts must be >= 1");
  const IndexSet oc = mask.observed.complement(mask.n);
  const auto forward = [&](const Matrix& d) {
    return project_tangent(t, project_mask(oc, d));
  };
  const auto adjoint = [&](const Matrix& y) {
    return project_mask(oc, project_tangent(t, y));
  };

  double best = 0.0;
  for (int s = 0; s < opts.restarts; ++s) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(s)));
    Matrix d;
    double dn = 0.0;
    for (int tries = 0; tries < 16; ++tries) {
      d = random_tangent_element(t, rng);
      dn = inf_norm(d);
      if (dn > 1e-300) break;
    }
    if (dn <= 1e-300)
      throw std::runtime_error("raiip_estimate: could not draw a nonzero tangent element");
    d /= dn;

    for (int it = 0; it <= opts.ascent_iters; ++it) {
      Matrix y = forward(d);
      Index bi = 0, bj = 0;
      const double ratio = y.size() ? y.cwiseAbs().maxCoeff(&bi, &bj) : 0.0;
      if (ratio > best) best = ratio;
      if (ratio <= 1e-300 || it == opts.ascent_iters) break;
      // Ascent: gradient of <E_bb, forward(D)> over the inf-ball, projected to T.
      Matrix e = Matrix::Zero(t.n(), t.n());
      e(bi, bj) = y(bi, bj) > 0.0 ? 1.0 : -1.0;
      Matrix g = adjoint(e);
      Matrix dn_mat = project_tangent(t, sign_pattern(g));
      const double norm_new = inf_norm(dn_mat);
      if (norm_new <= 1e-300) break;
      d = dn_mat / norm_new;
    }
  }
  return best;
}

double opnorm_pv_pt(const TangentSpace& t, const IndexSet& v_set,
                    const OperatorNormOptions& opts) {
  const MatrixOp op = [&](const Matrix& x) {
    return project_tangent(t, project_mask(v_set, project_tangent(t, x)));
  };
  return std::sqrt(std::max(operator_norm(op, t.n(), opts), 0.0));
}

double tangent_sampling_deviation(const TangentSpace& t, const IndexSet& o_set,
                                  const IndexSet& m_set, double pi,
                                  const OperatorNormOptions& opts) {
  if (!(pi > 0.0) || pi > 1.0)
    throw std::invalid_argument("tangent_sampling_deviation: pi must be in (0, 1]");
  const IndexSet om = o_set.set_intersection(m_set);
  const double inv_pi = 1.0 / pi;
  const MatrixOp op = [&](const Matrix& x) {
    const Matrix tx = project_tangent(t, x);
    return tx - inv_pi * project_tangent(t, project_mask(om, tx));
  };
  return operator_norm(op, t.n(), opts);
}

double tangent_inf_contraction(const TangentSpace& t, const IndexSet& o_set,
                               const IndexSet& m_set, double pi, const Matrix& d) {
  if (!(pi > 0.0) || pi > 1.0)
    throw std::invalid_argument("tangent_inf_contraction: pi must be in (0, 1]");
  const Matrix dt = project_tangent(t, d);
  const double dn = inf_norm(dt);
  if (dn <= 1e-300)
    throw std::invalid_argument("tangent_inf_contraction: D projects to zero");
  const IndexSet om = o_set.set_intersection(m_set);
  const Matrix moved = dt - (1.0 / pi) * project_tangent(t, project_mask(om, dt));
  return inf_norm(moved) / dn;
}

EnergyBound tangent_energy_bound(const TangentSpace& t, const IndexSet& n_set,
                                 const Matrix& p) {
  const double n = static_cast<double>(t.n());
  EnergyBound b;
  b.lhs = project_tangent(t, p).norm();
  b.rhs = (n + 1.0) * project_mask(n_set, p).norm() +
          n * project_tangent_complement(t, p).norm();
  return b;
}

ConditionReport check_conditions(const LowRankModel& model, const SamplingMask& mask,
                                 const CorruptionModel& corruption,
                                 const ConditionsConfig& config) {
  if (model.n != mask.n || model.n != corruption.n)
    throw std::invalid_argument("check_conditions: inconsistent sizes");
  const TangentSpace t = tangent_space(model);

  ConditionReport rep;
  rep.rho = corruption.rho;
  rep.rho_threshold = config.rho_threshold;

  const IncoherenceReport inc = incoherence(model);
  rep.nu = inc.nu;
  rep.uv_inf = inc.uv_inf;
  rep.uv_inf_ok = inc.passes_strong;

  std::ostringstream notes;
  try {
    const IndexSet oc = mask.observed.complement(mask.n);
    const MatrixOp op = [&](const Matrix& x) {
      return project_tangent(t, project_mask(oc, project_tangent(t, x)));
    };
    rep.opnorm_PT_POc_PT = operator_norm(op, mask.n, config.opnorm);
    rep.gamma_eff = 1.0 - rep.opnorm_PT_POc_PT / 2.0;
  } catch (const ConvergenceError& e) {
    rep.opnorm_PT_POc_PT = kNaN;
    rep.gamma_eff = kNaN;
    notes << "gamma:" << e.what() << ";";
  }

  try {
    rep.raiip_estimate = raiip_estimate(t, mask, config.raiip);
    rep.raiip_ok = rep.raiip_estimate < 1.0;
  } catch (const std::exception& e) {
    rep.raiip_estimate = kNaN;
    rep.raiip_ok = false;
    notes << "raiip:" << e.what() << ";";
  }

  try {
    rep.opnorm_PV_PT = opnorm_pv_pt(t, corrupted_observed(corruption, mask), config.opnorm);
  } catch (const ConvergenceError& e) {
    rep.opnorm_PV_PT = kNaN;
    notes << "pv_pt:" << e.what() << ";";
  }

  rep.notes = notes.str();
  rep.all_pass = rep.uv_inf_ok && (rep.gamma_eff > 0.75) && rep.raiip_ok &&
                 (rep.rho < rep.rho_threshold);
  return rep;
}

std::string ConditionReport::to_kv() const {
  std::ostringstream out;
  out << "nu=" << format_full(nu) << '\n'
      << "uv_inf=" << format_full(uv_inf) << '\n'
      << "uv_inf_ok=" << (uv_inf_ok ? "true" : "false") << '\n'
      << "opnorm_PT_POc_PT=" << format_full(opnorm_PT_POc_PT) << '\n'
      << "gamma_eff=" << format_full(gamma_eff) << '\n'
      << "raiip_estimate=" << format_full(raiip_estimate) << '\n'
      << "raiip_ok=" << (raiip_ok ? "true" : "false") << '\n'
      << "opnorm_PV_PT=" << format_full(opnorm_PV_PT) << '\n'
      << "rho=" << format_full(rho) << '\n'
      << "rho_threshold=" << format_full(rho_threshold) << '\n'
      << "all_pass=" << (all_pass ? "true" : "false") << '\n';
  if (!notes.empty()) out << "notes=" << notes << '\n';
  return out.str();
}

std::string ConditionReport::csv_header() {
  return "nu,uv_inf,uv_inf_ok,opnorm_PT_POc_PT,gamma_eff,raiip_estimate,raiip_ok,"
         "opnorm_PV_PT,rho,rho_threshold,all_pass";
}

std::string ConditionReport::to_csv_row() const {
  std::ostringstream out;
  out << format_full(nu) << ',' << format_full(uv_inf) << ',' << (uv_inf_ok ? 1 : 0) << ','
      << format_full(opnorm_PT_POc_PT) << ',' << format_full(gamma_eff) << ','
      << format_full(raiip_estimate) << ',' << (raiip_ok ? 1 : 0) << ','
      << format_full(opnorm_PV_PT) << ',' << format_full(rho) << ','
      << format_full(rho_threshold) << ',' << (all_pass ? 1 : 0);
  return out.str();
}

}  // namespace rmcds
