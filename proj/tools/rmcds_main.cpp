// Command-line front end: generate masks, check recovery conditions, solve,
// build and verify dual certificates, and run phase-transition sweeps.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rmcds/harness.hpp"
#include "rmcds/matrix_io.hpp"
#include "rmcds/rng.hpp"

namespace {

using namespace rmcds;

struct CommonArgs {
  Index n = 60;
  Index rank = 2;
  double rho = 0.0;
  std::string mask_text = "bernoulli";
  double rate = 0.6;
  std::uint64_t mask_seed = 1234567;
  std::uint64_t seed = 0;
  double lambda = 0.0;  // 0: theorem value
  double success_tol = 1e-4;
  std::string out;
  int threads = 0;  // 0: RMCDS_THREADS or 1
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--n", args.n, "matrix side length");
  cmd->add_option("--rank", args.rank, "rank of the low-rank part");
  cmd->add_option("--rho", args.rho, "corruption probability in [0,1)");
  cmd->add_option("--mask", args.mask_text,
                  "mask kind: full | decimation:M | block:B | bernoulli | file:PATH");
  cmd->add_option("--rate", args.rate, "bernoulli mask rate in (0,1]");
  cmd->add_option("--mask-seed", args.mask_seed, "seed freezing the bernoulli mask");
  cmd->add_option("--seed", args.seed, "master seed");
  cmd->add_option("--lambda", args.lambda, "sparsity weight; 0 = 1/sqrt(n log n)");
  cmd->add_option("--success-tol", args.success_tol, "relative error counted as success");
  cmd->add_option("--out", args.out, "output path");
  cmd->add_option("--threads", args.threads, "worker threads (env RMCDS_THREADS)");
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("RMCDS_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

MaskSpec build_mask_spec(const CommonArgs& args) {
  MaskSpec spec = parse_mask_spec(args.mask_text);
  spec.rate = args.rate;
  spec.seed = args.mask_seed;
  return spec;
}

ExperimentSpec build_experiment(const CommonArgs& args) {
  ExperimentSpec spec;
  spec.n = args.n;
  spec.r = args.rank;
  spec.rho = args.rho;
  spec.mask = build_mask_spec(args);
  if (args.lambda > 0.0) spec.lambda = args.lambda;
  spec.success_tol = args.success_tol;
  return spec;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (!field.empty()) values.push_back(std::stod(field));
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust matrix completion with deterministic sampling"};
  app.require_subcommand(1);

  CommonArgs args;

  auto* gen_mask = app.add_subcommand("gen-mask", "generate a mask file");
  add_common(gen_mask, args);

  auto* check = app.add_subcommand("check", "evaluate the recovery conditions");
  add_common(check, args);
  std::string check_csv;
  check->add_option("--csv", check_csv, "also write the report as one CSV row");

  auto* solve = app.add_subcommand("solve", "solve the convex program");
  add_common(solve, args);
  std::string y_path, out_l, out_s;
  solve->add_option("--y", y_path, "observed matrix CSV (synthetic instance when absent)");
  solve->add_option("--out-l", out_l, "write recovered L as CSV");
  solve->add_option("--out-s", out_s, "write recovered S as CSV");

  auto* certify = app.add_subcommand("certify", "construct and verify a dual certificate");
  add_common(certify, args);
  std::string dump_l, dump_s;
  certify->add_option("--dump-lambda-l", dump_l, "write the golfing part as CSV");
  certify->add_option("--dump-lambda-s", dump_s, "write the least-squares part as CSV");

  auto* sweep = app.add_subcommand("sweep", "phase-transition sweep, CSV output");
  add_common(sweep, args);
  std::string rho_grid, rate_grid, rank_grid, lambda_grid;
  int seeds_per_cell = 1;
  sweep->add_option("--rho-grid", rho_grid, "comma-separated rho values");
  sweep->add_option("--rate-grid", rate_grid, "comma-separated bernoulli rates");
  sweep->add_option("--rank-grid", rank_grid, "comma-separated ranks");
  sweep->add_option("--lambda-grid", lambda_grid, "comma-separated lambda values");
  sweep->add_option("--seeds-per-cell", seeds_per_cell, "trials per grid cell");

  auto* verify = app.add_subcommand("verify", "conditions -> certificate -> solve pipeline");
  add_common(verify, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (gen_mask->parsed()) {
      if (args.out.empty()) throw std::invalid_argument("gen-mask requires --out");
      write_mask(args.out, generate_mask(args.n, build_mask_spec(args)));
      return 0;
    }

    if (check->parsed()) {
      const ExperimentSpec spec = build_experiment(args);
      const auto model = generate_low_rank(spec.n, spec.r, derive_seed(args.seed, 1));
      const auto mask = generate_mask(spec.n, spec.mask);
      const auto corruption =
          generate_corruption(spec.n, spec.rho, spec.magnitude_scale,
                              derive_seed(args.seed, 2));
      const ConditionReport rep = check_conditions(model, mask, corruption);
      std::cout << rep.to_kv();
      if (!check_csv.empty()) {
        std::ofstream out(check_csv, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + check_csv);
        out << ConditionReport::csv_header() << '\n' << rep.to_csv_row() << '\n';
      }
      return 0;
    }

    if (solve->parsed()) {
      const ExperimentSpec spec = build_experiment(args);
      Matrix y;
      SamplingMask mask;
      if (!y_path.empty()) {
        y = read_matrix_csv(y_path);
        if (y.rows() != y.cols()) throw std::invalid_argument("--y must be square");
        mask = generate_mask(y.rows(), spec.mask);
      } else {
        mask = generate_mask(spec.n, spec.mask);
        const auto model = generate_low_rank(spec.n, spec.r, derive_seed(args.seed, 1));
        const auto corruption = generate_corruption(
            spec.n, spec.rho, spec.magnitude_scale, derive_seed(args.seed, 2));
        y = model.reconstruct() + corruption.sparse_matrix();
      }
      SolverConfig config;
      config.lambda = spec.lambda;
      const RecoveryResult result = solve_rmc(y, mask, config);
      std::cout << result.to_kv();
      if (!out_l.empty()) write_matrix_csv(out_l, result.L_star);
      if (!out_s.empty()) write_matrix_csv(out_s, result.S_star);
      return 0;
    }

    if (certify->parsed()) {
      const ExperimentSpec spec = build_experiment(args);
      const PipelineReport rep = verify_pipeline(spec, args.seed);
      std::cout << rep.to_text();
      if (!rep.trial.status.starts_with("ok"))
        std::cerr << "trial status: " << rep.trial.status << '\n';
      return 0;
    }

    if (sweep->parsed()) {
      if (args.out.empty()) throw std::invalid_argument("sweep requires --out");
      ExperimentSpec base = build_experiment(args);
      base.seeds.clear();
      if (seeds_per_cell < 1) throw std::invalid_argument("--seeds-per-cell must be >= 1");
      for (int i = 0; i < seeds_per_cell; ++i)
        base.seeds.push_back(derive_seed(args.seed, 1000 + static_cast<std::uint64_t>(i)));
      SweepGrid grid;
      grid.rho_values = parse_grid(rho_grid);
      grid.rate_values = parse_grid(rate_grid);
      for (double r : parse_grid(rank_grid)) grid.rank_values.push_back(static_cast<Index>(r));
      grid.lambda_values = parse_grid(lambda_grid);
      const SweepResult result = run_sweep(base, grid, resolve_threads(args.threads));
      write_trial_csv(args.out, result.rows);
      std::string summary_path = args.out;
      const auto dot = summary_path.rfind('.');
      summary_path = (dot == std::string::npos ? summary_path : summary_path.substr(0, dot)) +
                     "_summary.csv";
      write_sweep_summary_csv(summary_path, result.summary);
      std::cout << "rows=" << result.rows.size() << '\n'
                << "summary=" << summary_path << '\n'
                << "rho_trend_ok=" << (result.rho_trend_ok ? "true" : "false") << '\n';
      return 0;
    }

    if (verify->parsed()) {
      const ExperimentSpec spec = build_experiment(args);
      const PipelineReport rep = verify_pipeline(spec, args.seed);
      std::cout << rep.to_text();
      return 0;
    }
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
