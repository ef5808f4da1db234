// Release gate: every run prints one line per criterion and the process
// exit code is the number of failed criteria. Thresholds are fixed; a red
// line here means the solver or its tooling regressed.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "frmr/csv.hpp"
#include "frmr/decomp.hpp"
#include "frmr/manifold.hpp"
#include "frmr/rng.hpp"
#include "frmr/synth.hpp"

namespace fs = std::filesystem;
using namespace frmr;
using cli::Method;
using cli::RunRecord;

namespace {

template <typename Fn>
double time_seconds(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double geometric_mean(const std::vector<double>& v) {
  double log_sum = 0.0;
  for (double x : v) log_sum += std::log(x);
  return std::exp(log_sum / static_cast<double>(v.size()));
}

// Same shape the convergence command plants: r leading values from 2 down
// to 1, then a tail starting at gap and decaying geometrically.
Vector gapped_spectrum(int length, int r, double gap, double tail_decay) {
  Vector sigma(length);
  for (int i = 0; i < r; ++i)
    sigma(i) = r > 1 ? 2.0 - static_cast<double>(i) / (r - 1) : 2.0;
  double tail = gap;
  for (int i = r; i < length; ++i) {
    sigma(i) = tail;
    tail *= tail_decay;
  }
  return sigma;
}

struct SolveCase {
  SyntheticProblem problem;
  Decomposition decomp;
  RecoveryMetrics metrics;
  double wall = 0.0;
};

// Recovery-benchmark configuration. The dual residuals ||U^T Y|| and ||Y V||
// settle only after the sparse support has fully resolved; they jitter up to
// ~1e-5 of ||M|| while marginal entries still cross the shrinkage threshold.
// Stopping at 1e-13 relative feasibility lands past that regime on every
// benchmark instance while staying inside the iteration budgets.
AdmConfig benchmark_config() {
  AdmConfig cfg;
  cfg.tol_primal = 1e-13;
  return cfg;
}

SolveCase solve_case(int n, int r, double frac, std::uint64_t seed) {
  SolveCase c;
  c.problem = generate_problem(n, n, r, frac, seed);
  c.wall =
      time_seconds([&] { c.decomp = fr_adm(c.problem.m, r, benchmark_config()); });
  c.metrics = recovery_errors(c.problem, c.decomp);
  // The optimality pass only needs m and the decomposition.
  c.problem.l_true.resize(0, 0);
  c.problem.s_true.resize(0, 0);
  return c;
}

std::vector<std::string> record_row(const SolveCase& c, int n, int r,
                                    double frac, std::uint64_t seed) {
  RunRecord rec;
  rec.method = Method::kFrAdm;
  rec.rows = n;
  rec.cols = n;
  rec.rank = r;
  rec.outlier_fraction = frac;
  rec.seed = seed;
  rec.err_l = c.metrics.err_l;
  rec.err_s = c.metrics.err_s;
  rec.phase_err = c.metrics.phase_err;
  rec.iterations = c.decomp.iterations;
  rec.converged = c.decomp.converged;
  rec.wall_time_s = c.wall;
  return cli::run_record_row(rec);
}

// Joins rows into one string with the wall-time field (the last one)
// replaced, so reruns can be compared bytewise.
std::string join_masked(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i + 1 < row.size(); ++i) {
      out += row[i];
      out += ',';
    }
    out += "t\n";
  }
  return out;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Context {
  fs::path dir;
  std::vector<SolveCase> rank10;
  std::vector<SolveCase> rank50;
  std::vector<std::vector<std::string>> rank10_rows;
  std::vector<std::vector<std::string>> large_rows;
  cli::PhaseGridOptions grid;
};

constexpr int kRank10Seeds = 10;
constexpr int kRank50Seeds = 5;

bool criterion_1(Context& ctx, std::string& detail) {
  std::vector<double> err_l, err_s, iters;
  double max_wall = 0.0;
  for (int i = 0; i < kRank10Seeds; ++i) {
    const std::uint64_t seed = cli::cell_seed(1, i);
    SolveCase c = solve_case(500, 10, 0.1, seed);
    ctx.rank10_rows.push_back(record_row(c, 500, 10, 0.1, seed));
    err_l.push_back(c.metrics.err_l);
    err_s.push_back(c.metrics.err_s);
    iters.push_back(c.decomp.iterations);
    max_wall = std::max(max_wall, c.wall);
    ctx.rank10.push_back(std::move(c));
  }
  const double med_l = median(err_l);
  const double med_s = median(err_s);
  const double med_it = median(iters);
  detail = "median err_l=" + fmt(med_l) + " err_s=" + fmt(med_s) +
           " iterations=" + fmt(med_it) + " max_wall=" + fmt(max_wall) + "s";
  return med_l <= 1e-8 && med_s <= 1e-5 && med_it <= 60.0 && max_wall <= 10.0;
}

bool criterion_2(Context& ctx, std::string& detail) {
  std::vector<double> err_l, iters;
  for (int i = 0; i < kRank50Seeds; ++i) {
    SolveCase c = solve_case(500, 50, 0.1, cli::cell_seed(2, i));
    err_l.push_back(c.metrics.err_l);
    iters.push_back(c.decomp.iterations);
    ctx.rank50.push_back(std::move(c));
  }
  const double med_l = median(err_l);
  const double med_it = median(iters);
  detail = "median err_l=" + fmt(med_l) + " iterations=" + fmt(med_it);
  return med_l <= 1e-7 && med_it <= 80.0;
}

bool criterion_3(Context&, std::string& detail) {
  Rng rng(300);
  double max_rel = 0.0;
  int checked = 0;
  const double total = time_seconds([&] {
    for (int i = 0; i < 100; ++i) {
      const int rows = 20 + static_cast<int>(rng.index(41));
      const int cols = 15 + static_cast<int>(rng.index(36));
      const int r = 1 + static_cast<int>(rng.index(8));
      const double gap = 0.05 + 0.45 * rng.uniform01();
      const double decay = 0.5 + 0.5 * rng.uniform01();
      const Matrix m = matrix_with_spectrum(
          rows, cols, gapped_spectrum(std::min(rows, cols), r, gap, decay),
          cli::cell_seed(3, i));
      const FixedRankResult full = fixed_rank_opt_full(m, r);
      if (!full.trace.converged) {
        max_rel = 1.0;
        continue;
      }
      const SvdTriplet t = tsvd_oracle(m, r);
      const Matrix best = t.u * t.sigma.asDiagonal() * t.v.transpose();
      max_rel = std::max(
          max_rel, (reconstruct(full.factors) - best).norm() / best.norm());
      ++checked;
    }
  });
  detail = "instances=" + std::to_string(checked) +
           " max_rel=" + fmt(max_rel) + " total=" + fmt(total) + "s";
  return checked == 100 && max_rel <= 1e-9 && total < 10.0;
}

// The rank-r frames align with the dominant singular subspaces at the squared
// spectral-gap rate. The reconstruction error is the wrong probe for that
// rate: it also carries a frame-mixing mode between leading singular pairs,
// contracting like s_i s_j (s_i - s_j)^2 / (s_i^2 + s_j^2)^2, which dominates
// once the gap is small. So the rate check watches the subspaces themselves.
bool criterion_4(Context&, std::string& detail) {
  const double gaps[] = {0.1, 0.5, 0.9};
  bool ok = true;
  detail.clear();
  for (int g = 0; g < 3; ++g) {
    const double gap = gaps[g];
    const Matrix m = matrix_with_spectrum(
        60, 50, gapped_spectrum(50, 5, gap, 1.0), cli::cell_seed(4, g));
    const SvdTriplet t = tsvd_oracle(m, 5);
    const StiefelPoint u_best{t.u};
    const StiefelPoint v_best{t.v};
    std::vector<double> errors;
    PolarFactors f = identity_factors(60, 50, 5);
    for (int i = 0; i < 11; ++i) {
      f = fixed_rank_opt_step(m, f);
      errors.push_back(std::max(subspace_distance(f.u, u_best),
                                subspace_distance(f.v, v_best)));
    }
    std::vector<double> ratios;
    for (int i = 2; i <= 8; ++i) {  // sweeps 3..10, 0-based indices 2..9
      if (errors[i] >= 1e-13 && errors[i + 1] >= 1e-13)
        ratios.push_back(errors[i + 1] / errors[i]);
    }
    const double target = gap * gap;
    const bool enough = ratios.size() >= 2;
    const double gm = enough ? geometric_mean(ratios) : 0.0;
    const bool within = enough && gm >= target / 2.0 && gm <= target * 2.0;
    ok = ok && within;
    if (g) detail += " ";
    detail += "gap=" + fmt(gap) + ": rate=" + fmt(gm) +
              " target=" + fmt(target) +
              " ratios=" + std::to_string(ratios.size());
  }
  return ok;
}

bool criterion_5(Context&, std::string& detail) {
  Rng rng(500);
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int rows = 5 + static_cast<int>(rng.index(36));
    const int cols = 4 + static_cast<int>(rng.index(27));
    const int r = 1 + static_cast<int>(rng.index(
                          static_cast<std::uint64_t>(std::min(rows, cols))));
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
    Matrix gu(rows, r), gv(cols, r), gb(r, r);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < r; ++j) gu(i, j) = rng.gaussian();
    for (int i = 0; i < cols; ++i)
      for (int j = 0; j < r; ++j) gv(i, j) = rng.gaussian();
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) gb(i, j) = rng.gaussian();
    PolarFactors start{project_stiefel(gu), project_spd(gb),
                       project_stiefel(gv)};
    StepCosts c;
    fixed_rank_opt_step(m, start, &c);
    const double slack = 1e-10 * std::max(1.0, c.before);
    const double chain[] = {c.before, c.after_u, c.after_v, c.after_b};
    for (int k = 0; k < 3; ++k) {
      if (chain[k + 1] > chain[k] + slack) {
        ++violations;
        worst = std::max(worst, chain[k + 1] - chain[k]);
      }
    }
  }
  detail = "invocations=500 violations=" + std::to_string(violations) +
           (violations ? " worst_increase=" + fmt(worst) : "");
  return violations == 0;
}

bool criterion_6(Context& ctx, std::string& detail) {
  double worst = 0.0;
  int runs = 0;
  auto scan = [&](const std::vector<SolveCase>& batch) {
    for (const SolveCase& c : batch) {
      if (!c.decomp.converged) continue;
      const KktResiduals k = kkt_residuals(c.problem.m, c.decomp,
                                           c.decomp.mu_history.back());
      const double scale = c.problem.m.norm();
      worst = std::max({worst, k.r_uty / scale, k.r_yv / scale,
                        k.r_prox / scale, k.r_feas});
      ++runs;
    }
  };
  scan(ctx.rank10);
  scan(ctx.rank50);
  detail = "converged_runs=" + std::to_string(runs) +
           " max_residual=" + fmt(worst);
  return runs == kRank10Seeds + kRank50Seeds && worst <= 1e-6;
}

bool criterion_7(Context& ctx, std::string& detail) {
  const std::uint64_t seed = cli::cell_seed(7, 0);
  const RunRecord full =
      cli::run_instance(Method::kFrAdm, 2000, 2000, 10, 0.1, seed, {});
  const RunRecord sub =
      cli::run_instance(Method::kFrNys, 2000, 2000, 10, 0.1, seed, {});
  ctx.large_rows.push_back(cli::run_record_row(full));
  ctx.large_rows.push_back(cli::run_record_row(sub));
  const double ratio =
      sub.wall_time_s > 0.0 ? full.wall_time_s / sub.wall_time_s : 0.0;
  detail = "sub err_l=" + fmt(sub.err_l) + " full=" + fmt(full.wall_time_s) +
           "s sub=" + fmt(sub.wall_time_s) + "s speedup=" + fmt(ratio);
  return full.converged && sub.converged && sub.err_l <= 1e-6 &&
         ratio >= 3.0;
}

bool criterion_8(Context& ctx, std::string& detail) {
  ctx.grid.output = (ctx.dir / "grid1.csv").string();
  ctx.grid.base_seed = 8;
  std::ostringstream sink;
  cli::cmd_phase_grid(ctx.grid, sink);

  std::istringstream in(slurp(ctx.grid.output));
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> phase;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string f;
    for (int i = 0; i < 6; ++i) std::getline(fields, f, ',');
    phase.push_back(std::stod(f));  // mean_phase_err, field 6
  }
  if (phase.size() != 25) {
    detail = "expected 25 cells, got " + std::to_string(phase.size());
    return false;
  }
  const double easy = phase[0 * 5 + 0];   // smallest rank, fewest outliers
  const double hard = phase[4 * 5 + 4];   // largest rank, most outliers
  bool diagonal_ok = true;
  for (int i = 0; i + 1 < 5; ++i) {
    const double a = phase[i * 5 + i];
    const double b = phase[(i + 1) * 5 + (i + 1)];
    if (b < 0.9 * a - 1e-12) diagonal_ok = false;
  }
  detail = "easy=" + fmt(easy) + " hard=" + fmt(hard) +
           " diagonal_monotone=" + (diagonal_ok ? "yes" : "no");
  return easy <= 1e-6 && hard >= 1e-2 && diagonal_ok;
}

bool criterion_9(Context& ctx, std::string& detail) {
  if (ctx.rank10_rows.size() != kRank10Seeds || ctx.large_rows.size() != 2) {
    detail = "earlier runs incomplete, nothing to compare";
    return false;
  }

  std::vector<std::vector<std::string>> rank10_again;
  for (int i = 0; i < kRank10Seeds; ++i) {
    rank10_again.push_back(cli::run_record_row(
        cli::run_instance(Method::kFrAdm, 500, 500, 10, 0.1,
                          cli::cell_seed(1, i), benchmark_config())));
  }
  const bool rank10_same =
      join_masked(rank10_again) == join_masked(ctx.rank10_rows);

  const std::uint64_t seed = cli::cell_seed(7, 0);
  std::vector<std::vector<std::string>> large_again;
  large_again.push_back(cli::run_record_row(
      cli::run_instance(Method::kFrAdm, 2000, 2000, 10, 0.1, seed, {})));
  large_again.push_back(cli::run_record_row(
      cli::run_instance(Method::kFrNys, 2000, 2000, 10, 0.1, seed, {})));
  const bool large_same =
      join_masked(large_again) == join_masked(ctx.large_rows);

  cli::PhaseGridOptions grid2 = ctx.grid;
  grid2.output = (ctx.dir / "grid2.csv").string();
  std::ostringstream sink;
  cli::cmd_phase_grid(grid2, sink);
  const bool grid_same = slurp(ctx.grid.output) == slurp(grid2.output);

  detail = std::string("rank10=") + (rank10_same ? "same" : "DIFFERS") +
           " large=" + (large_same ? "same" : "DIFFERS") +
           " grid=" + (grid_same ? "same" : "DIFFERS") +
           " (wall time masked where present)";
  return rank10_same && large_same && grid_same;
}

}  // namespace

int main() {
  Context ctx;
  ctx.dir = fs::temp_directory_path() /
            ("frmr_acceptance_" + std::to_string(static_cast<long>(::getpid())));
  fs::remove_all(ctx.dir);
  fs::create_directories(ctx.dir);

  struct Entry {
    const char* name;
    bool (*run)(Context&, std::string&);
  };
  const Entry entries[] = {
      {"rank-10 recovery over 10 seeds", criterion_1},
      {"rank-50 recovery over 5 seeds", criterion_2},
      {"sweep limit matches the truncated SVD on 100 instances", criterion_3},
      {"contraction rate tracks the squared spectral gap", criterion_4},
      {"substep residuals never increase over 500 random sweeps", criterion_5},
      {"first-order optimality at every converged termination", criterion_6},
      {"subsampled solve is accurate and at least 3x faster at 2000^2",
       criterion_7},
      {"phase surface: clean corner recovers, saturated corner fails",
       criterion_8},
      {"identical reruns reproduce result tables byte for byte", criterion_9},
  };

  int failures = 0;
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = entries[i].run(ctx, detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << (i + 1) << " "
              << entries[i].name << ": " << detail << "\n";
    std::cout.flush();
  }
  std::cout << (9 - failures) << "/9 criteria passed\n";
  return failures;
}
