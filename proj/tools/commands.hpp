#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "frmr/decomp.hpp"
#include "frmr/synth.hpp"

namespace frmr::cli {

enum class Method { kFrAdm, kFrAdmExact, kFrNys };

// Accepts "fradm", "fradm_exact", "frnys"; throws std::invalid_argument.
Method parse_method(const std::string& name);
std::string method_name(Method method);

// One solver run on one synthetic instance, flattened for result tables.
// wall_time_s covers the solve only, not problem generation, and is the
// single field reruns are allowed to differ in.
struct RunRecord {
  int schema_version = 1;
  Method method = Method::kFrAdm;
  int rows = 0;
  int cols = 0;
  int rank = 0;
  double outlier_fraction = 0.0;
  std::uint64_t seed = 0;
  double err_l = 0.0;
  double err_s = 0.0;
  double phase_err = 0.0;
  int iterations = 0;
  bool converged = false;
  double wall_time_s = 0.0;
};

std::vector<std::string> run_record_header();
std::vector<std::string> run_record_row(const RunRecord& r);

// Per-cell seeds are an affine function of the cell index so any cell can
// be reproduced in isolation.
std::uint64_t cell_seed(std::uint64_t base, std::uint64_t cell);

RunRecord run_instance(Method method, int rows, int cols, int rank,
                       double outlier_fraction, std::uint64_t seed,
                       const AdmConfig& cfg, int oversample_k = 10);

// Runs job(0..count-1) across a worker pool. Workers pull indices from a
// shared counter; the first exception wins and is rethrown on the caller
// after all workers drain.
void run_indexed(std::size_t count, unsigned threads,
                 const std::function<void(std::size_t)>& job);

// Relative reconstruction error against the truncated SVD after each sweep,
// starting from the identity frames. Shared by the convergence command and
// the rate checks in the test suites.
std::vector<double> convergence_errors(const Matrix& m, int r, int sweeps);

struct DecomposeOptions {
  std::string input;
  std::string out_prefix;
  int rank = 1;
  std::string method = "fradm";
  AdmConfig adm;
  int oversample_k = 10;
  std::uint64_t shuffle_seed = 0;
};
int cmd_decompose(const DecomposeOptions& opt, std::ostream& out);

struct SynthOptions {
  int rows = 200;
  int cols = 200;
  int rank = 10;
  double outlier_fraction = 0.1;
  std::uint64_t seed = 1;
  std::string out_prefix;
};
int cmd_synth(const SynthOptions& opt, std::ostream& out);

struct PhaseGridOptions {
  int size = 200;
  int rank_steps = 5;
  int outlier_steps = 5;
  int reps = 3;
  double rank_fraction_lo = 0.05;
  double rank_fraction_hi = 0.6;
  double outlier_lo = 0.1;
  double outlier_hi = 0.5;
  double epsilon = 1e-3;
  std::uint64_t base_seed = 1;
  std::string method = "fradm";
  AdmConfig adm;
  std::string output;
  unsigned threads = 0;  // 0 picks the hardware thread count
};
int cmd_phase_grid(const PhaseGridOptions& opt, std::ostream& out);

struct ConvergenceOptions {
  int rows = 60;
  int cols = 50;
  int rank = 5;
  double gap = 0.5;
  double tail_decay = 0.9;
  std::uint64_t seed = 1;
  int sweeps = 30;
  std::string output;
};
int cmd_convergence(const ConvergenceOptions& opt, std::ostream& out);

struct ScalingOptions {
  std::vector<int> sizes;
  int rank = 10;
  double rank_fraction = 0.0;  // >0 overrides rank with fraction * size
  double outlier_fraction = 0.1;
  int reps = 1;
  std::vector<std::string> methods = {"fradm", "fradm_exact", "frnys"};
  std::uint64_t base_seed = 1;
  bool allow_large = false;
  int oversample_k = 10;
  AdmConfig adm;
  std::string output;
};
int cmd_scaling(const ScalingOptions& opt, std::ostream& out);

}  // namespace frmr::cli
