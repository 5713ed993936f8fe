#include "rmcds/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rmcds/matrix_io.hpp"
#include "rmcds/rng.hpp"

namespace rmcds {

namespace {

// Module substream indices under a trial seed.
constexpr std::uint64_t kModelStream = 1;
constexpr std::uint64_t kCorruptionStream = 2;
constexpr std::uint64_t kGolfingStream = 3;

double mask_param_of(const MaskSpec& spec) {
  switch (spec.kind) {
    case MaskKind::Decimation: return static_cast<double>(spec.period);
    case MaskKind::Block: return static_cast<double>(spec.block);
    case MaskKind::Bernoulli: return spec.rate;
    default: return 0.0;
  }
}

struct Instance {
  LowRankModel model;
  SamplingMask mask;
  CorruptionModel corruption;
  TangentSpace tangent;
  Matrix l0;
  Matrix s0_bar;
  Matrix sigma_bar;
  IndexSet v_set;
  IndexSet n_set;
  double lambda = 0.0;
};

Instance build_instance(const ExperimentSpec& spec, std::uint64_t seed) {
  Instance inst;
  inst.model = generate_low_rank(spec.n, spec.r, derive_seed(seed, kModelStream));
  inst.mask = generate_mask(spec.n, spec.mask);
  inst.corruption = generate_corruption(spec.n, spec.rho, spec.magnitude_scale,
                                        derive_seed(seed, kCorruptionStream));
  inst.tangent = tangent_space(inst.model);
  inst.l0 = inst.model.reconstruct();
  inst.s0_bar = observed_sparse(inst.corruption, inst.mask);
  inst.sigma_bar = observed_sign(inst.corruption, inst.mask);
  inst.v_set = corrupted_observed(inst.corruption, inst.mask);
  inst.n_set = clean_observed(inst.corruption, inst.mask);
  inst.lambda = spec.lambda ? *spec.lambda : theorem_lambda(spec.n);
  return inst;
}

}  // namespace

TrialRecord run_trial(const ExperimentSpec& spec, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.n = spec.n;
  rec.r = spec.r;
  rec.rho = spec.rho;
  rec.mask_kind = mask_kind_name(spec.mask.kind);
  rec.mask_param = mask_param_of(spec.mask);
  rec.mask_seed = spec.mask.seed;
  rec.seed = seed;
  rec.success_tol = spec.success_tol;

  try {
    const Instance inst = build_instance(spec, seed);
    rec.lambda = inst.lambda;

    rec.conditions = check_conditions(inst.model, inst.mask, inst.corruption,
                                      spec.conditions);

    SolverConfig solver_cfg = spec.solver;
    solver_cfg.lambda = inst.lambda;
    const Matrix y = inst.l0 + inst.corruption.sparse_matrix();
    const RecoveryResult result = solve_rmc(y, inst.mask, solver_cfg);

    rec.converged = result.converged;
    rec.iterations = result.iterations;
    rec.primal_residual = result.primal_residual;
    rec.objective = result.objective;
    rec.rel_err_l = (result.L_star - inst.l0).norm() / inst.l0.norm();
    rec.sparse_err = (result.S_star - inst.s0_bar).norm() / (1.0 + inst.s0_bar.norm());
    rec.success = rec.converged && rec.rel_err_l <= spec.success_tol;

    if (spec.run_certificates) {
      GolfingOptions golf_opts;
      golf_opts.seed = derive_seed(seed, kGolfingStream);
      const auto golf = golfing_certificate(inst.tangent, inst.mask,
                                            inst.corruption.support, spec.rho,
                                            default_golfing_batches(spec.n), golf_opts);
      Matrix lambda_total = golf.lambda_l;
      if (!inst.v_set.empty()) {
        const auto ls = least_squares_certificate(inst.tangent, inst.mask, inst.v_set,
                                                  inst.sigma_bar, inst.lambda);
        lambda_total += ls.lambda_s;
      }
      rec.kkt = verify_kkt(lambda_total, inst.tangent, inst.sigma_bar, inst.v_set,
                           inst.n_set, inst.lambda);
      rec.kkt_evaluated = true;
    }
  } catch (const std::exception& e) {
    rec.status = std::string("error:") + e.what();
  }

  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::string TrialRecord::csv_header() {
  return "status,n,r,rho,mask_kind,mask_param,mask_seed,lambda,seed,success_tol," +
         ConditionReport::csv_header() +
         ",rel_err_l,sparse_err,success,converged,iterations,primal_residual,objective,"
         "kkt_evaluated," + KKTReport::csv_header() + ",wall_ms";
}

std::string TrialRecord::to_csv_row() const {
  std::ostringstream out;
  out << status << ',' << n << ',' << r << ',' << format_full(rho) << ',' << mask_kind
      << ',' << format_full(mask_param) << ',' << mask_seed << ',' << format_full(lambda)
      << ',' << seed << ',' << format_full(success_tol) << ',' << conditions.to_csv_row()
      << ',' << format_full(rel_err_l) << ',' << format_full(sparse_err) << ','
      << (success ? 1 : 0) << ',' << (converged ? 1 : 0) << ',' << iterations << ','
      << format_full(primal_residual) << ',' << format_full(objective) << ','
      << (kkt_evaluated ? 1 : 0) << ',' << kkt.to_csv_row() << ',' << format_full(wall_ms);
  return out.str();
}

SweepResult run_sweep(const ExperimentSpec& base, const SweepGrid& grid, int threads) {
  std::vector<double> rhos = grid.rho_values.empty() ? std::vector<double>{base.rho}
                                                     : grid.rho_values;
  std::vector<double> rates = grid.rate_values;
  if (rates.empty()) {
    rates.push_back(base.mask.kind == MaskKind::Bernoulli ? base.mask.rate : 0.0);
  }
  std::vector<Index> ranks = grid.rank_values.empty() ? std::vector<Index>{base.r}
                                                      : grid.rank_values;
  std::vector<std::optional<double>> lambdas;
  if (grid.lambda_values.empty()) {
    lambdas.push_back(base.lambda);
  } else {
    for (double l : grid.lambda_values) lambdas.emplace_back(l);
  }
  if (base.seeds.empty()) throw std::invalid_argument("run_sweep: seeds must be non-empty");
  if (rhos.empty() || ranks.empty()) throw std::invalid_argument("run_sweep: empty grid");

  struct Job {
    ExperimentSpec spec;
    std::uint64_t seed;
    std::size_t cell;
  };
  std::vector<Job> jobs;
  std::vector<SweepCell> cells;
  for (double rho : rhos) {
    for (double rate : rates) {
      for (Index r : ranks) {
        for (const auto& lambda : lambdas) {
          ExperimentSpec spec = base;
          spec.rho = rho;
          spec.r = r;
          spec.lambda = lambda;
          if (spec.mask.kind == MaskKind::Bernoulli && rate > 0.0) spec.mask.rate = rate;
          SweepCell cell;
          cell.rho = rho;
          cell.rate = spec.mask.kind == MaskKind::Bernoulli ? spec.mask.rate : 1.0;
          cell.r = r;
          cell.lambda = lambda.value_or(0.0);
          const std::size_t cell_id = cells.size();
          cells.push_back(cell);
          for (std::uint64_t seed : spec.seeds) jobs.push_back({spec, seed, cell_id});
        }
      }
    }
  }

  std::vector<TrialRecord> rows(jobs.size());
  const int workers = std::max(1, threads);
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i)
      rows[i] = run_trial(jobs[i].spec, jobs[i].seed);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1))
          rows[i] = run_trial(jobs[i].spec, jobs[i].seed);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    SweepCell& cell = cells[jobs[i].cell];
    cell.trials += 1;
    if (rows[i].success) cell.successes += 1;
  }
  for (SweepCell& cell : cells)
    cell.success_fraction = cell.trials ? static_cast<double>(cell.successes) / cell.trials
                                        : 0.0;

  // Soft trend probe: success fraction should not increase along rho by more
  // than one dip of magnitude 0.1, holding the other axes fixed.
  SweepResult result;
  result.rows = std::move(rows);
  result.summary = std::move(cells);
  int inversions = 0;
  double worst = 0.0;
  for (std::size_t a = 0; a < result.summary.size(); ++a) {
    for (std::size_t b = 0; b < result.summary.size(); ++b) {
      const auto& ca = result.summary[a];
      const auto& cb = result.summary[b];
      if (ca.rate == cb.rate && ca.r == cb.r && ca.lambda == cb.lambda &&
          ca.rho < cb.rho && cb.success_fraction > ca.success_fraction + 1e-12) {
        ++inversions;
        worst = std::max(worst, cb.success_fraction - ca.success_fraction);
      }
    }
  }
  result.rho_trend_ok = inversions <= 1 && worst <= 0.1 + 1e-12;
  return result;
}

void write_trial_csv(const std::string& path, const std::vector<TrialRecord>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << TrialRecord::csv_header() << '\n';
  for (const auto& row : rows) out << row.to_csv_row() << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void write_sweep_summary_csv(const std::string& path, const std::vector<SweepCell>& cells) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "rho,rate,r,lambda,trials,successes,success_fraction\n";
  for (const auto& cell : cells) {
    out << format_full(cell.rho) << ',' << format_full(cell.rate) << ',' << cell.r << ','
        << format_full(cell.lambda) << ',' << cell.trials << ',' << cell.successes << ','
        << format_full(cell.success_fraction) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

PipelineReport verify_pipeline(const ExperimentSpec& spec, std::uint64_t seed) {
  PipelineReport rep;
  ExperimentSpec with_certs = spec;
  with_certs.run_certificates = false;  // certificates run explicitly below
  rep.trial = run_trial(with_certs, seed);

  try {
    const Instance inst = build_instance(spec, seed);

    GolfingOptions golf_opts;
    golf_opts.seed = derive_seed(seed, kGolfingStream);
    const auto golf = golfing_certificate(inst.tangent, inst.mask, inst.corruption.support,
                                          spec.rho, default_golfing_batches(spec.n),
                                          golf_opts);
    rep.golfing = golf.diag;
    Matrix lambda_total = golf.lambda_l;
    if (!inst.v_set.empty()) {
      const auto ls = least_squares_certificate(inst.tangent, inst.mask, inst.v_set,
                                                inst.sigma_bar, inst.lambda);
      rep.least_squares = ls.diag;
      lambda_total += ls.lambda_s;
    }
    rep.kkt = verify_kkt(lambda_total, inst.tangent, inst.sigma_bar, inst.v_set,
                         inst.n_set, inst.lambda);
    rep.trial.kkt = rep.kkt;
    rep.trial.kkt_evaluated = true;
    rep.kkt_pass = rep.kkt.pass;

    const IndexSet n_perp = inst.n_set.complement(spec.n);
    const MatrixOp op = [&](const Matrix& x) {
      return project_tangent(inst.tangent,
                             project_mask(n_perp, project_tangent(inst.tangent, x)));
    };
    rep.pnperp_pt_norm = std::sqrt(std::max(operator_norm(op, spec.n), 0.0));

    rep.solver_success = rep.trial.success;
    rep.implication_holds =
        !(rep.kkt_pass && rep.pnperp_pt_norm < 1.0) || rep.solver_success;

    if (!rep.solver_success) {
      std::ostringstream which;
      if (rep.kkt.t_fro >= rep.kkt.thr_t_fro) which << "t_fro ";
      if (rep.kkt.t_perp_op >= rep.kkt.thr_t_perp) which << "t_perp_op ";
      if (rep.kkt.v_exact > rep.kkt.thr_v_exact) which << "v_exact ";
      if (rep.kkt.n_inf >= rep.kkt.thr_n_inf) which << "n_inf ";
      rep.failed_margin = which.str().empty() ? "none" : which.str();
    } else {
      rep.failed_margin = "none";
    }
  } catch (const std::exception& e) {
    if (rep.trial.status == "ok") rep.trial.status = std::string("error:") + e.what();
    rep.failed_margin = "certificate-error";
    rep.implication_holds = true;  // vacuous when the certificate could not be built
  }
  return rep;
}

std::string PipelineReport::to_text() const {
  std::ostringstream out;
  out << "== conditions ==\n" << trial.conditions.to_kv();
  out << "== golfing ==\n";
  out << "eta=" << format_full(golfing.eta) << "\nk=" << golfing.k << '\n';
  if (!golfing.d_norms.empty()) {
    out << "d_norm_first=" << format_full(golfing.d_norms.front()) << '\n'
        << "d_norm_final=" << format_full(golfing.d_norms.back()) << '\n';
  }
  out << "lambda_inf=" << format_full(golfing.lambda_inf) << '\n'
      << "perp_opnorm=" << format_full(golfing.perp_opnorm) << '\n'
      << "diverged=" << (golfing.diverged ? "true" : "false") << '\n';
  out << "== least-squares ==\n"
      << "v_residual=" << format_full(least_squares.v_residual) << '\n'
      << "perp_opnorm=" << format_full(least_squares.perp_opnorm) << '\n'
      << "n_inf=" << format_full(least_squares.n_inf) << '\n'
      << "series_norm=" << format_full(least_squares.series_norm) << '\n'
      << "terms_used=" << least_squares.terms_used << '\n';
  out << "== kkt ==\n" << kkt.to_kv();
  out << "== recovery ==\n"
      << "rel_err_l=" << format_full(trial.rel_err_l) << '\n'
      << "sparse_err=" << format_full(trial.sparse_err) << '\n'
      << "success=" << (trial.success ? "true" : "false") << '\n'
      << "converged=" << (trial.converged ? "true" : "false") << '\n';
  out << "== cross-check ==\n"
      << "pnperp_pt_norm=" << format_full(pnperp_pt_norm) << '\n'
      << "kkt_pass=" << (kkt_pass ? "true" : "false") << '\n'
      << "implication_holds=" << (implication_holds ? "true" : "false") << '\n'
      << "failed_margin=" << failed_margin << '\n'
      << "status=" << trial.status << '\n';
  return out.str();
}

}  // namespace rmcds
