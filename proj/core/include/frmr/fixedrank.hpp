#pragma once

#include <vector>

#include "frmr/manifold.hpp"

namespace frmr {

// Rank-r product u b v^T with u, v column-orthonormal and b symmetric.
struct PolarFactors {
  StiefelPoint u;  // m x r
  SpdCandidate b;  // r x r
  StiefelPoint v;  // n x r
};

struct FixedRankConfig {
  double tol = 1e-12;  // relative cost-decrease stop
  int max_iter = 500;
};

struct ConvergenceTrace {
  std::vector<double> cost;        // ||m - u b v^T||_F after each step
  std::vector<double> subspace_u;  // distance between successive u frames
  std::vector<double> subspace_v;
  std::vector<double> b_min_eigenvalue;
  int iterations = 0;
  bool converged = false;
};

// Residual costs sampled inside one step, after each substep.
struct StepCosts {
  double before = 0.0;
  double after_u = 0.0;
  double after_v = 0.0;
  double after_b = 0.0;
};

struct FixedRankResult {
  PolarFactors factors;
  ConvergenceTrace trace;
};

// u = I_{m x r}, b = I_r, v = I_{n x r}: the canonical cold start.
PolarFactors identity_factors(int m, int n, int r);

// One sweep of the three exact substeps
//   u <- project_stiefel(m v0 b0)
//   v <- project_stiefel(m^T u b0)
//   b <- project_spd(u^T m v)
// in that order; the residual cannot increase across the sweep. If the
// first projection is rank-deficient the sweep retries once from a seeded
// random orthonormal start, then rethrows. Pass costs to sample the
// residual after each substep.
PolarFactors fixed_rank_opt_step(const Matrix& m, const PolarFactors& prev,
                                 StepCosts* costs = nullptr);

// Iterate fixed_rank_opt_step from the identity start until the relative
// cost decrease falls below cfg.tol (or the cost itself is negligible),
// then take a few fixed polish sweeps; converges to the best rank-r
// approximation of m. max_iter exhaustion is reported via the trace, not
// thrown.
FixedRankResult fixed_rank_opt_full(const Matrix& m, int r,
                                    const FixedRankConfig& cfg = {});

// || u1 u1^T - u2 u2^T ||_F, computed from the projection residual
// u2 - u1 (u1^T u2) without forming the p x p projectors; exact zero for
// identical frames up to roundoff in the residual itself.
double subspace_distance(const StiefelPoint& u1, const StiefelPoint& u2);

Matrix reconstruct(const PolarFactors& f);

}  // namespace frmr
