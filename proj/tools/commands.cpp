#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "frmr/csv.hpp"
#include "frmr/manifold.hpp"

namespace frmr::cli {

namespace {

double linspace_at(double lo, double hi, int steps, int i) {
  if (steps <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

Vector gapped_spectrum(int length, int r, double gap, double tail_decay) {
  Vector sigma(length);
  for (int i = 0; i < r; ++i)
    sigma(i) = r > 1 ? 2.0 - static_cast<double>(i) / (r - 1) : 2.0;
  double tail = gap;  // sigma(r-1) is 1 by construction
  for (int i = r; i < length; ++i) {
    sigma(i) = tail;
    tail *= tail_decay;
  }
  return sigma;
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "fradm") return Method::kFrAdm;
  if (name == "fradm_exact") return Method::kFrAdmExact;
  if (name == "frnys") return Method::kFrNys;
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected fradm, fradm_exact or frnys)");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::kFrAdm: return "fradm";
    case Method::kFrAdmExact: return "fradm_exact";
    case Method::kFrNys: return "frnys";
  }
  throw std::invalid_argument("unknown method value");
}

std::vector<std::string> run_record_header() {
  return {"schema_version", "method",     "rows",       "cols",
          "rank",           "outlier_fraction", "seed", "err_l",
          "err_s",          "phase_err",  "iterations", "converged",
          "wall_time_s"};
}

std::vector<std::string> run_record_row(const RunRecord& r) {
  return {std::to_string(r.schema_version),
          method_name(r.method),
          std::to_string(r.rows),
          std::to_string(r.cols),
          std::to_string(r.rank),
          format_full(r.outlier_fraction),
          std::to_string(r.seed),
          format_full(r.err_l),
          format_full(r.err_s),
          format_full(r.phase_err),
          std::to_string(r.iterations),
          r.converged ? "1" : "0",
          format_full(r.wall_time_s)};
}

std::uint64_t cell_seed(std::uint64_t base, std::uint64_t cell) {
  return base + 1000003ull * cell;
}

RunRecord run_instance(Method method, int rows, int cols, int rank,
                       double outlier_fraction, std::uint64_t seed,
                       const AdmConfig& cfg, int oversample_k) {
  const SyntheticProblem p =
      generate_problem(rows, cols, rank, outlier_fraction, seed);

  const auto start = std::chrono::steady_clock::now();
  Decomposition d;
  switch (method) {
    case Method::kFrAdm:
      d = fr_adm(p.m, rank, cfg);
      break;
    case Method::kFrAdmExact:
      d = fr_adm_exact(p.m, rank, cfg);
      break;
    case Method::kFrNys:
      d = fr_nys(p.m, rank, cfg,
                 NystromConfig{oversample_k, 1e-12, seed + 1});
      break;
  }
  const double elapsed = seconds_since(start);

  const RecoveryMetrics metrics = recovery_errors(p, d);
  RunRecord rec;
  rec.method = method;
  rec.rows = rows;
  rec.cols = cols;
  rec.rank = rank;
  rec.outlier_fraction = outlier_fraction;
  rec.seed = seed;
  rec.err_l = metrics.err_l;
  rec.err_s = metrics.err_s;
  rec.phase_err = metrics.phase_err;
  rec.iterations = d.iterations;
  rec.converged = d.converged;
  rec.wall_time_s = elapsed;
  return rec;
}

void run_indexed(std::size_t count, unsigned threads,
                 const std::function<void(std::size_t)>& job) {
  if (count == 0) return;
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, count));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto drain = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(drain);
  drain();
  for (auto& worker : pool) worker.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> convergence_errors(const Matrix& m, int r, int sweeps) {
  if (sweeps < 1)
    throw std::invalid_argument("convergence_errors: need at least 1 sweep");
  const SvdTriplet t = tsvd_oracle(m, r);
  const Matrix best = t.u * t.sigma.asDiagonal() * t.v.transpose();
  const double scale = best.norm();

  std::vector<double> errors;
  errors.reserve(sweeps);
  PolarFactors f = identity_factors(static_cast<int>(m.rows()),
                                    static_cast<int>(m.cols()), r);
  for (int i = 0; i < sweeps; ++i) {
    f = fixed_rank_opt_step(m, f);
    errors.push_back(
        relative_or_absolute((reconstruct(f) - best).norm(), scale));
  }
  return errors;
}

int cmd_decompose(const DecomposeOptions& opt, std::ostream& out) {
  const Method method = parse_method(opt.method);
  const Matrix m = read_matrix_csv(opt.input);

  const auto start = std::chrono::steady_clock::now();
  Decomposition d;
  switch (method) {
    case Method::kFrAdm:
      d = fr_adm(m, opt.rank, opt.adm);
      break;
    case Method::kFrAdmExact:
      d = fr_adm_exact(m, opt.rank, opt.adm);
      break;
    case Method::kFrNys:
      d = fr_nys(m, opt.rank, opt.adm,
                 NystromConfig{opt.oversample_k, 1e-12, opt.shuffle_seed});
      break;
  }
  const double elapsed = seconds_since(start);

  write_matrix_csv(d.l, opt.out_prefix + "L.csv");
  write_matrix_csv(d.s, opt.out_prefix + "S.csv");

  const double mu =
      d.mu_history.empty() ? opt.adm.mu0 : d.mu_history.back();
  const KktResiduals k = kkt_residuals(m, d, mu);
  const double residual = d.primal_residual_history.empty()
                              ? 0.0
                              : d.primal_residual_history.back();
  out << "method: " << method_name(method) << "\n"
      << "shape: " << m.rows() << " x " << m.cols() << ", rank " << opt.rank
      << "\n"
      << "iterations: " << d.iterations << "\n"
      << "converged: " << (d.converged ? "yes" : "no") << "\n"
      << "primal_residual: " << format_full(residual) << "\n"
      << "kkt: r_uty=" << format_full(k.r_uty)
      << " r_yv=" << format_full(k.r_yv)
      << " r_prox=" << format_full(k.r_prox)
      << " r_feas=" << format_full(k.r_feas) << "\n"
      << "wall_time_s: " << format_full(elapsed) << "\n"
      << "wrote: " << opt.out_prefix << "L.csv, " << opt.out_prefix
      << "S.csv\n";
  return d.converged ? 0 : 2;
}

int cmd_synth(const SynthOptions& opt, std::ostream& out) {
  const SyntheticProblem p = generate_problem(
      opt.rows, opt.cols, opt.rank, opt.outlier_fraction, opt.seed);
  write_matrix_csv(p.m, opt.out_prefix + "M.csv");
  write_matrix_csv(p.l_true, opt.out_prefix + "Ltrue.csv");
  write_matrix_csv(p.s_true, opt.out_prefix + "Strue.csv");
  out << "wrote: " << opt.out_prefix << "M.csv, " << opt.out_prefix
      << "Ltrue.csv, " << opt.out_prefix << "Strue.csv (" << opt.rows << " x "
      << opt.cols << ", rank " << opt.rank << ", outlier fraction "
      << format_full(opt.outlier_fraction) << ", seed " << opt.seed << ")\n";
  return 0;
}

int cmd_phase_grid(const PhaseGridOptions& opt, std::ostream& out) {
  if (opt.size < 2) throw std::invalid_argument("phase-grid: size too small");
  if (opt.rank_steps < 1 || opt.outlier_steps < 1 || opt.reps < 1)
    throw std::invalid_argument("phase-grid: steps and reps must be >= 1");
  if (opt.output.empty())
    throw std::invalid_argument("phase-grid: output path required");
  const Method method = parse_method(opt.method);

  const std::size_t cells =
      static_cast<std::size_t>(opt.rank_steps) * opt.outlier_steps;
  const std::size_t total = cells * opt.reps;
  std::vector<RunRecord> records(total);

  run_indexed(total, opt.threads, [&](std::size_t job) {
    const std::size_t cell = job / opt.reps;
    const int i = static_cast<int>(cell) / opt.outlier_steps;
    const int j = static_cast<int>(cell) % opt.outlier_steps;
    const double rank_fraction =
        linspace_at(opt.rank_fraction_lo, opt.rank_fraction_hi,
                    opt.rank_steps, i);
    const double outliers =
        linspace_at(opt.outlier_lo, opt.outlier_hi, opt.outlier_steps, j);
    const int rank = std::max(
        1, static_cast<int>(std::llround(rank_fraction * opt.size)));
    records[job] = run_instance(method, opt.size, opt.size, rank, outliers,
                                cell_seed(opt.base_seed, job), opt.adm);
  });

  std::vector<std::vector<std::string>> rows;
  rows.reserve(cells);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const int i = static_cast<int>(cell) / opt.outlier_steps;
    const int j = static_cast<int>(cell) % opt.outlier_steps;
    double err_l = 0.0;
    double phase = 0.0;
    int converged = 0;
    for (int rep = 0; rep < opt.reps; ++rep) {
      const RunRecord& r = records[cell * opt.reps + rep];
      err_l += r.err_l;
      phase += r.phase_err;
      converged += r.converged ? 1 : 0;
    }
    err_l /= opt.reps;
    phase /= opt.reps;
    rows.push_back({std::to_string(1),
                    format_full(linspace_at(opt.rank_fraction_lo,
                                            opt.rank_fraction_hi,
                                            opt.rank_steps, i)),
                    format_full(linspace_at(opt.outlier_lo, opt.outlier_hi,
                                            opt.outlier_steps, j)),
                    std::to_string(records[cell * opt.reps].rank),
                    format_full(err_l), format_full(phase),
                    std::to_string(converged), std::to_string(opt.reps)});
  }
  write_csv(opt.output,
            {"schema_version", "rank_fraction", "outlier_fraction", "rank",
             "mean_err_l", "mean_phase_err", "converged_runs", "reps"},
            rows);
  out << "wrote: " << opt.output << " (" << opt.rank_steps << " x "
      << opt.outlier_steps << " cells, " << opt.reps << " reps, size "
      << opt.size << ")\n";
  return 0;
}

int cmd_convergence(const ConvergenceOptions& opt, std::ostream& out) {
  if (opt.rank < 1 || opt.rank >= std::min(opt.rows, opt.cols))
    throw std::invalid_argument(
        "convergence: rank must leave room for a spectral tail");
  if (!(opt.gap > 0.0 && opt.gap < 1.0))
    throw std::invalid_argument("convergence: gap must lie in (0, 1)");
  if (!(opt.tail_decay > 0.0 && opt.tail_decay <= 1.0))
    throw std::invalid_argument("convergence: tail_decay must lie in (0, 1]");
  if (opt.output.empty())
    throw std::invalid_argument("convergence: output path required");

  const Vector sigma = gapped_spectrum(std::min(opt.rows, opt.cols), opt.rank,
                                       opt.gap, opt.tail_decay);
  const Matrix m = matrix_with_spectrum(opt.rows, opt.cols, sigma, opt.seed);
  const std::vector<double> errors =
      convergence_errors(m, opt.rank, opt.sweeps);

  std::vector<std::vector<std::string>> rows;
  rows.reserve(errors.size());
  double predicted = 1.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    predicted *= opt.gap * opt.gap;
    rows.push_back({std::to_string(1), std::to_string(i + 1),
                    format_full(errors[i]), format_full(predicted)});
  }
  write_csv(opt.output,
            {"schema_version", "sweep", "rel_err", "predicted_rate"}, rows);
  out << "wrote: " << opt.output << " (" << errors.size()
      << " sweeps, gap " << format_full(opt.gap) << ")\n";
  return 0;
}

int cmd_scaling(const ScalingOptions& opt, std::ostream& out) {
  if (opt.sizes.empty())
    throw std::invalid_argument("scaling: at least one size required");
  if (opt.reps < 1) throw std::invalid_argument("scaling: reps must be >= 1");
  if (opt.output.empty())
    throw std::invalid_argument("scaling: output path required");
  std::vector<Method> methods;
  methods.reserve(opt.methods.size());
  for (const std::string& name : opt.methods)
    methods.push_back(parse_method(name));
  if (methods.empty())
    throw std::invalid_argument("scaling: at least one method required");

  std::vector<int> sizes = opt.sizes;
  std::sort(sizes.begin(), sizes.end());
  for (int n : sizes) {
    if (n < 2) throw std::invalid_argument("scaling: size too small");
    if (n > 2000 && !opt.allow_large)
      throw std::invalid_argument(
          "scaling: size " + std::to_string(n) +
          " exceeds 2000; pass --allow-large to run it anyway");
  }

  std::vector<std::vector<std::string>> rows;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const int n = sizes[si];
    int rank = opt.rank;
    if (opt.rank_fraction > 0.0)
      rank = std::max(1,
                      static_cast<int>(std::llround(opt.rank_fraction * n)));
    rank = std::min(rank, n);
    for (int rep = 0; rep < opt.reps; ++rep) {
      const std::uint64_t seed =
          cell_seed(opt.base_seed, si * opt.reps + rep);
      for (const Method method : methods) {
        const RunRecord rec =
            run_instance(method, n, n, rank, opt.outlier_fraction, seed,
                         opt.adm, opt.oversample_k);
        rows.push_back(run_record_row(rec));
        out << method_name(method) << " n=" << n << " rank=" << rank
            << " seed=" << seed << ": err_l=" << format_full(rec.err_l)
            << " iterations=" << rec.iterations
            << " wall_time_s=" << format_full(rec.wall_time_s) << "\n";
      }
    }
  }
  write_csv(opt.output, run_record_header(), rows);
  out << "wrote: " << opt.output << " (" << rows.size() << " runs)\n";
  return 0;
}

}  // namespace frmr::cli
