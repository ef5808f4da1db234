#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "frmr/csv.hpp"
#include "frmr/matrix.hpp"

namespace {

// Shared solver flags; every subcommand that runs the solver takes these.
void add_adm_flags(CLI::App* cmd, frmr::AdmConfig* adm) {
  cmd->add_option("--mu0", adm->mu0, "Initial penalty weight");
  cmd->add_option("--rho", adm->rho, "Penalty growth factor (> 1)");
  cmd->add_option("--mu-bar", adm->mu_bar, "Penalty cap");
  cmd->add_option("--tol", adm->tol_primal,
                  "Relative primal feasibility stop");
  cmd->add_option("--max-iter", adm->max_iter, "Iteration cap");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Decompose a matrix into a fixed-rank part plus a sparse part"};
  app.require_subcommand(1);

  frmr::cli::DecomposeOptions dec;
  auto* dec_cmd = app.add_subcommand(
      "decompose", "Split a CSV matrix into low-rank and sparse parts");
  dec_cmd->add_option("input", dec.input, "Input matrix CSV")->required();
  dec_cmd->add_option("-o,--out", dec.out_prefix,
                      "Output prefix; writes <prefix>L.csv and <prefix>S.csv")
      ->required();
  dec_cmd->add_option("-r,--rank", dec.rank, "Target rank")
      ->required()
      ->check(CLI::PositiveNumber);
  dec_cmd->add_option("-m,--method", dec.method,
                      "fradm, fradm_exact or frnys");
  dec_cmd->add_option("--oversample", dec.oversample_k,
                      "frnys sketch width multiplier");
  dec_cmd->add_option("--shuffle-seed", dec.shuffle_seed,
                      "frnys row shuffle seed");
  add_adm_flags(dec_cmd, &dec.adm);

  frmr::cli::SynthOptions syn;
  auto* syn_cmd = app.add_subcommand(
      "synth", "Generate a planted low-rank plus sparse instance");
  syn_cmd->add_option("-o,--out", syn.out_prefix,
                      "Output prefix; writes <prefix>M.csv, <prefix>Ltrue.csv "
                      "and <prefix>Strue.csv")
      ->required();
  syn_cmd->add_option("--rows", syn.rows, "Rows")->check(CLI::PositiveNumber);
  syn_cmd->add_option("--cols", syn.cols, "Columns")
      ->check(CLI::PositiveNumber);
  syn_cmd->add_option("-r,--rank", syn.rank, "Planted rank")
      ->check(CLI::PositiveNumber);
  syn_cmd->add_option("-f,--outliers", syn.outlier_fraction,
                      "Outlier fraction in [0, 1]");
  syn_cmd->add_option("-s,--seed", syn.seed, "Generator seed");

  frmr::cli::PhaseGridOptions grid;
  auto* grid_cmd = app.add_subcommand(
      "phase-grid",
      "Sweep rank fraction x outlier fraction and tabulate recovery");
  grid_cmd->add_option("-o,--out", grid.output, "Output CSV")->required();
  grid_cmd->add_option("--size", grid.size, "Square instance size");
  grid_cmd->add_option("--rank-steps", grid.rank_steps, "Grid rows");
  grid_cmd->add_option("--outlier-steps", grid.outlier_steps, "Grid columns");
  grid_cmd->add_option("--reps", grid.reps, "Instances per cell");
  grid_cmd->add_option("--rank-frac-lo", grid.rank_fraction_lo,
                       "Smallest rank fraction");
  grid_cmd->add_option("--rank-frac-hi", grid.rank_fraction_hi,
                       "Largest rank fraction");
  grid_cmd->add_option("--outlier-lo", grid.outlier_lo,
                       "Smallest outlier fraction");
  grid_cmd->add_option("--outlier-hi", grid.outlier_hi,
                       "Largest outlier fraction");
  grid_cmd->add_option("--epsilon", grid.epsilon,
                       "Deviation threshold for the phase metric");
  grid_cmd->add_option("-s,--seed", grid.base_seed, "Base seed");
  grid_cmd->add_option("-m,--method", grid.method,
                       "fradm, fradm_exact or frnys");
  grid_cmd->add_option("--threads", grid.threads,
                       "Worker threads (0 = hardware)");
  add_adm_flags(grid_cmd, &grid.adm);

  frmr::cli::ConvergenceOptions conv;
  auto* conv_cmd = app.add_subcommand(
      "convergence",
      "Per-sweep error against the truncated SVD on a gapped spectrum");
  conv_cmd->add_option("-o,--out", conv.output, "Output CSV")->required();
  conv_cmd->add_option("--rows", conv.rows, "Rows")
      ->check(CLI::PositiveNumber);
  conv_cmd->add_option("--cols", conv.cols, "Columns")
      ->check(CLI::PositiveNumber);
  conv_cmd->add_option("-r,--rank", conv.rank, "Target rank")
      ->check(CLI::PositiveNumber);
  conv_cmd->add_option("--gap", conv.gap,
                       "Spectral gap sigma_{r+1}/sigma_r in (0, 1)");
  conv_cmd->add_option("--tail-decay", conv.tail_decay,
                       "Decay of the spectral tail");
  conv_cmd->add_option("-s,--seed", conv.seed, "Generator seed");
  conv_cmd->add_option("--sweeps", conv.sweeps, "Sweeps to record")
      ->check(CLI::PositiveNumber);

  frmr::cli::ScalingOptions scale;
  auto* scale_cmd = app.add_subcommand(
      "scaling", "Time the solvers on square instances of growing size");
  scale_cmd->add_option("-o,--out", scale.output, "Output CSV")->required();
  scale_cmd->add_option("--sizes", scale.sizes, "Square sizes to run")
      ->required()
      ->delimiter(',');
  scale_cmd->add_option("-r,--rank", scale.rank, "Target rank")
      ->check(CLI::PositiveNumber);
  scale_cmd->add_option("--rank-fraction", scale.rank_fraction,
                        "If > 0, rank = fraction * size");
  scale_cmd->add_option("-f,--outliers", scale.outlier_fraction,
                        "Outlier fraction in [0, 1]");
  scale_cmd->add_option("--reps", scale.reps, "Instances per size");
  scale_cmd->add_option("--methods", scale.methods,
                        "Subset of fradm, fradm_exact, frnys")
      ->delimiter(',');
  scale_cmd->add_option("-s,--seed", scale.base_seed, "Base seed");
  scale_cmd->add_flag("--allow-large", scale.allow_large,
                      "Permit sizes above 2000");
  scale_cmd->add_option("--oversample", scale.oversample_k,
                        "frnys sketch width multiplier");
  add_adm_flags(scale_cmd, &scale.adm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // app.exit prints the message/help; fold CLI11's error enum into the
    // documented usage exit code. --help/--version exit 0.
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (dec_cmd->parsed()) return frmr::cli::cmd_decompose(dec, std::cout);
    if (syn_cmd->parsed()) return frmr::cli::cmd_synth(syn, std::cout);
    if (grid_cmd->parsed()) return frmr::cli::cmd_phase_grid(grid, std::cout);
    if (conv_cmd->parsed())
      return frmr::cli::cmd_convergence(conv, std::cout);
    if (scale_cmd->parsed()) return frmr::cli::cmd_scaling(scale, std::cout);
  } catch (const frmr::CsvParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const frmr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
