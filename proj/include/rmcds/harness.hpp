#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmcds/certificate.hpp"
#include "rmcds/conditions.hpp"
#include "rmcds/corruption.hpp"
#include "rmcds/mask.hpp"
#include "rmcds/model.hpp"
#include "rmcds/solver.hpp"

namespace rmcds {

struct ExperimentSpec {
  Index n = 60;
  Index r = 2;
  double rho = 0.0;
  MaskSpec mask;
  std::optional<double> lambda;  // empty: theorem value at run time
  std::vector<std::uint64_t> seeds{0};
  SolverConfig solver{};
  ConditionsConfig conditions{};
  double magnitude_scale = 1.0;
  double success_tol = 1e-4;
  bool run_certificates = true;  // KKT columns become empty when off
  std::string out_path;
};

struct TrialRecord {
  // spec scalars
  std::string status = "ok";  // "ok" or "error:<what>"
  Index n = 0;
  Index r = 0;
  double rho = 0.0;
  std::string mask_kind;
  double mask_param = 0.0;
  std::uint64_t mask_seed = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double success_tol = 0.0;
  // conditions
  ConditionReport conditions;
  // recovery
  double rel_err_l = 0.0;  // ||L* - L0||_F / ||L0||_F
  double sparse_err = 0.0; // ||S* - S0_bar||_F / (1 + ||S0_bar||_F)
  bool success = false;    // rel_err_l <= success_tol (implies converged)
  bool converged = false;
  int iterations = 0;
  double primal_residual = 0.0;
  double objective = 0.0;
  // certificate
  bool kkt_evaluated = false;
  KKTReport kkt;
  double wall_ms = 0.0;  // informational only, excluded from reproducibility

  static std::string csv_header();
  std::string to_csv_row() const;
};

/// One fully deterministic trial: generate, check conditions, solve, score,
/// and (optionally) construct and verify certificates. Module substreams are
/// derived from the trial seed; errors land in `status`, never thrown.
TrialRecord run_trial(const ExperimentSpec& spec, std::uint64_t seed);

struct SweepGrid {
  std::vector<double> rho_values;
  std::vector<double> rate_values;    // bernoulli mask rates
  std::vector<Index> rank_values;
  std::vector<double> lambda_values;  // empty: theorem value
};

struct SweepCell {
  double rho = 0.0;
  double rate = 0.0;
  Index r = 0;
  double lambda = 0.0;  // 0 marks theorem mode
  int trials = 0;
  int successes = 0;
  double success_fraction = 0.0;
};

struct SweepResult {
  std::vector<TrialRecord> rows;
  std::vector<SweepCell> summary;
  bool rho_trend_ok = true;  // success fraction non-increasing in rho up to one 0.1 dip
};

/// Grid sweep over rho x sampling-rate x rank (x optional lambda). One row
/// per (cell, seed); per-cell success fractions in the summary. Trials run
/// in parallel when threads > 1; records are schedule-independent.
SweepResult run_sweep(const ExperimentSpec& base, const SweepGrid& grid, int threads = 1);

void write_trial_csv(const std::string& path, const std::vector<TrialRecord>& rows);
void write_sweep_summary_csv(const std::string& path, const std::vector<SweepCell>& cells);

struct PipelineReport {
  TrialRecord trial;
  GolfingDiagnostics golfing;
  LeastSquaresDiagnostics least_squares;
  KKTReport kkt;
  double pnperp_pt_norm = 0.0;  // ||P_{N^perp} P_T||
  bool kkt_pass = false;
  bool solver_success = false;
  bool implication_holds = false;  // kkt_pass && pnperp_pt_norm < 1 => solver_success
  std::string failed_margin;       // which certificate margin failed, or "none"

  std::string to_text() const;
};

/// conditions -> golfing -> least-squares -> KKT -> solver, with the
/// certificate-implies-recovery cross-check.
PipelineReport verify_pipeline(const ExperimentSpec& spec, std::uint64_t seed);

}  // namespace rmcds
