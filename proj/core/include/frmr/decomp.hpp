#pragma once

#include <cstdint>
#include <vector>

#include "frmr/fixedrank.hpp"

namespace frmr {

// l-update projector: a single alternating polar sweep (warm-started, cheap)
// or an exact truncated SVD each iteration.
enum class Projection { kPolarStep, kExactTsvd };

struct AdmConfig {
  double mu0 = 1.0;
  // Continuation ratio. Must outrun the single-sweep projector only slowly:
  // once the shrinkage width 1/mu drops below the per-entry error of l, s
  // starts absorbing that error verbatim and the iteration locks in place.
  // 1.25 stays clear of that regime on random instances up to at least 50%
  // outliers; ratios above ~1.4 stall at 1e-2 relative error.
  double rho = 1.25;
  double mu_bar = 1e9;
  double tol_primal = 1e-9;  // relative primal feasibility stop
  int max_iter = 300;
  Projection projection = Projection::kPolarStep;
};

struct NystromConfig {
  int oversample_k = 10;          // sketch width l = oversample_k * r
  double pinv_threshold = 1e-12;  // relative to the largest singular value
  std::uint64_t shuffle_seed = 0;
};

struct KktResiduals {
  double r_uty = 0.0;   // ||u^T y||_F
  double r_yv = 0.0;    // ||y v||_F
  double r_prox = 0.0;  // ||s - soft_threshold(s + y/mu, 1/mu)||_F
  double r_feas = 0.0;  // ||m - l - s||_F / ||m||_F
};

struct Decomposition {
  Matrix l;
  Matrix s;
  Matrix y;
  PolarFactors factors;  // l = reconstruct(factors)
  int iterations = 0;
  bool converged = false;
  std::vector<double> primal_residual_history;  // relative, one per iteration
  std::vector<double> mu_history;               // mu used at each iteration
  std::vector<int> row_permutation;  // fr_nys only: shuffled row i came from
                                     // input row row_permutation[i]
};

// Alternating-direction solver for  min ||s||_1  s.t.  m = l + s,
// rank(l) = r. Each iteration takes one fixed_rank_opt_step (warm-started
// from the previous factors), shrinks s, updates the multiplier y and grows
// mu geometrically. Stops on relative primal feasibility.
Decomposition fr_adm(const Matrix& m, int r, const AdmConfig& cfg = {});

// Same loop with the l-update replaced by a full truncated SVD; the
// comparison baseline for the single-sweep update.
Decomposition fr_adm_exact(const Matrix& m, int r, const AdmConfig& cfg = {});

// Subsampled variant: shuffle rows, solve the left m x l and top l x n
// blocks independently (l = oversample_k * r), then recombine as
// l_left * pinv(corner) * l_top and undo the shuffle. s is defined as the
// residual m - l. The two block solves run concurrently.
Decomposition fr_nys(const Matrix& m, int r, const AdmConfig& cfg = {},
                     const NystromConfig& nys = {});

// First-order optimality of a decomposition at multiplier scale mu.
KktResiduals kkt_residuals(const Matrix& m, const Decomposition& d, double mu);

}  // namespace frmr
