#pragma once

#include <cstdint>
#include <string>

#include "rmcds/corruption.hpp"
#include "rmcds/index_set.hpp"
#include "rmcds/mask.hpp"
#include "rmcds/model.hpp"
#include "rmcds/operator_norm.hpp"
#include "rmcds/projectors.hpp"

namespace rmcds {

struct RaiipOptions {
  int restarts = 100;
  int ascent_iters = 50;
  std::uint64_t seed = 0xaa17ULL;
};

struct ConditionsConfig {
  double rho_threshold = 0.1;  // stand-in for the "small enough" corruption rate
  OperatorNormOptions opnorm{};
  RaiipOptions raiip{};
};

/// Isomerism margin 1 - ||P_T P_Oc P_T|| / 2; the > 3/4 requirement is
/// equivalent to ||P_T P_Oc P_T|| < 1/2.
double gamma_isomeric(const TangentSpace& t, const SamplingMask& mask,
                      const OperatorNormOptions& opts = {});

/// Lower bound on the restricted infinity-norm of P_T P_Oc over T, i.e.
/// sup_{D in T} ||P_T P_Oc [D]||_inf / ||D||_inf, by multi-start projected
/// sign ascent. Monotone in restarts (max over independent substreams).
double raiip_estimate(const TangentSpace& t, const SamplingMask& mask,
                      const RaiipOptions& opts = {});

/// ||P_V P_T|| as the square root of ||P_T P_V P_T||.
double opnorm_pv_pt(const TangentSpace& t, const IndexSet& v_set,
                    const OperatorNormOptions& opts = {});

/// ||P_T - pi^{-1} P_T P_O P_M P_T|| for a sampling batch M at rate pi.
double tangent_sampling_deviation(const TangentSpace& t, const IndexSet& o_set,
                                  const IndexSet& m_set, double pi,
                                  const OperatorNormOptions& opts = {});

/// ||(I - pi^{-1} P_T P_O P_M)[D]||_inf / ||D||_inf for D in T (projected on
/// entry). Throws std::invalid_argument when D projects to zero.
double tangent_inf_contraction(const TangentSpace& t, const IndexSet& o_set,
                               const IndexSet& m_set, double pi, const Matrix& d);

struct EnergyBound {
  double lhs = 0.0;  // ||P_T[P]||_F
  double rhs = 0.0;  // (n+1) ||P_N[P]||_F + n ||P_Tc[P]||_F
};

/// Both sides of the tangent-energy inequality; callers assert lhs <= rhs.
EnergyBound tangent_energy_bound(const TangentSpace& t, const IndexSet& n_set,
                                 const Matrix& p);

struct ConditionReport {
  double nu = 0.0;
  double uv_inf = 0.0;
  bool uv_inf_ok = false;
  double opnorm_PT_POc_PT = 0.0;
  double gamma_eff = 0.0;        // 1 - opnorm_PT_POc_PT / 2
  double raiip_estimate = 0.0;   // lower bound
  bool raiip_ok = false;         // estimate < 1
  double opnorm_PV_PT = 0.0;
  double rho = 0.0;
  double rho_threshold = 0.0;
  bool all_pass = false;
  std::string notes;  // estimator failures, empty when clean

  std::string to_kv() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

/// Assembles every measurable hypothesis of the recovery theory for one
/// instance. Estimator failures are recorded in `notes` (fields become NaN
/// and all_pass false), never thrown.
ConditionReport check_conditions(const LowRankModel& model, const SamplingMask& mask,
                                 const CorruptionModel& corruption,
                                 const ConditionsConfig& config = {});

}  // namespace rmcds
