#include "frmr/fixedrank.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "frmr/rng.hpp"

namespace frmr {

namespace {

// Denominator guard for the relative-decrease stop.
constexpr double kDecreaseFloor = 1e-30;
// The identity-based cost estimate carries summation noise up to roughly
// length * eps * ||m||^2 under the square root; estimates below this
// relative level are confirmed against a directly computed residual.
constexpr double kRecomputeTol = 1e-6;
// Below this relative directly-computed residual the fit is exact.
constexpr double kZeroCostTol = 1e-12;
// The cost plateaus into rounding noise while the iterate is still a few
// contractions away from the truncated SVD, so after the cost rule fires we
// always take a fixed number of extra sweeps.
constexpr int kPolishSweeps = 8;
constexpr std::uint64_t kRestartSeed = 0x9e3779b97f4a7c15ull;

// ||m - u b v^T||_F through ||m||^2 - 2 tr(b^T u^T m v) + ||b||^2; valid for
// orthonormal u, v. Clamped: the identity cancels once the true residual
// drops below ~sqrt(eps) * ||m||.
double factored_cost(double m_sqnorm, const Matrix& utmv, const Matrix& b) {
  const double c2 =
      m_sqnorm - 2.0 * (b.array() * utmv.array()).sum() + b.squaredNorm();
  return std::sqrt(std::max(c2, 0.0));
}

void check_factor_shapes(const Matrix& m, const PolarFactors& f) {
  const auto r = f.b.b.rows();
  if (f.b.b.cols() != r || f.u.q.rows() != m.rows() || f.u.q.cols() != r ||
      f.v.q.rows() != m.cols() || f.v.q.cols() != r)
    throw ShapeMismatchError(
        "fixed_rank_opt_step: factor shapes do not match the input");
}

}  // namespace

PolarFactors identity_factors(int m, int n, int r) {
  if (r < 1 || r > std::min(m, n))
    throw InvalidRankError("identity_factors: rank " + std::to_string(r) +
                           " outside [1, " + std::to_string(std::min(m, n)) +
                           "]");
  return {StiefelPoint{Matrix::Identity(m, r)},
          SpdCandidate{Matrix::Identity(r, r), 1.0},
          StiefelPoint{Matrix::Identity(n, r)}};
}

PolarFactors fixed_rank_opt_step(const Matrix& m, const PolarFactors& prev,
                                 StepCosts* costs) {
  check_factor_shapes(m, prev);
  const int r = static_cast<int>(prev.b.b.rows());

  StiefelPoint u;
  const Matrix* v0 = &prev.v.q;
  Matrix v_restart;
  try {
    u = project_stiefel(m * (prev.v.q * prev.b.b));
  } catch (const RankDeficientError&) {
    // The start frame misses part of the row space; retry once from a
    // seeded random orthonormal perturbation, then give up.
    Rng rng(kRestartSeed);
    Matrix g(m.cols(), r);
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < r; ++j) g(i, j) = rng.gaussian();
    v_restart = project_stiefel(prev.v.q + g).q;
    u = project_stiefel(m * (v_restart * prev.b.b));
    v0 = &v_restart;
  }

  StiefelPoint v = project_stiefel(m.transpose() * (u.q * prev.b.b));
  const Matrix utm = u.q.transpose() * m;  // r x n, shared by cost samples
  const Matrix utmv = utm * v.q;
  SpdCandidate b = project_spd(utmv);

  if (costs) {
    const double m_sqnorm = m.squaredNorm();
    costs->before = factored_cost(
        m_sqnorm, (prev.u.q.transpose() * m) * prev.v.q, prev.b.b);
    costs->after_u = factored_cost(m_sqnorm, utm * *v0, prev.b.b);
    costs->after_v = factored_cost(m_sqnorm, utmv, prev.b.b);
    costs->after_b = factored_cost(m_sqnorm, utmv, b.b);
  }
  return {std::move(u), std::move(b), std::move(v)};
}

FixedRankResult fixed_rank_opt_full(const Matrix& m, int r,
                                    const FixedRankConfig& cfg) {
  require_finite(m, "fixed_rank_opt_full");
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1)
    throw std::invalid_argument("fixed_rank_opt_full: bad config");

  PolarFactors f = identity_factors(static_cast<int>(m.rows()),
                                    static_cast<int>(m.cols()), r);
  ConvergenceTrace trace;
  const double m_norm = m.norm();
  double prev_cost = 0.0;
  bool polishing = false;
  int polish_left = 0;
  StepCosts costs;

  while (trace.iterations < cfg.max_iter) {
    const PolarFactors before = f;
    f = fixed_rank_opt_step(m, f, &costs);
    ++trace.iterations;
    double cost = costs.after_b;
    if (cost <= kRecomputeTol * m_norm)
      cost = (m - reconstruct(f)).norm();
    trace.cost.push_back(cost);
    trace.subspace_u.push_back(subspace_distance(f.u, before.u));
    trace.subspace_v.push_back(subspace_distance(f.v, before.v));
    trace.b_min_eigenvalue.push_back(f.b.min_eigenvalue);

    if (polishing) {
      if (--polish_left <= 0) break;
      continue;
    }
    if (cost <= kZeroCostTol * m_norm) {
      trace.converged = true;
      break;
    }
    if (trace.iterations >= 2 &&
        std::abs(cost - prev_cost) / std::max(prev_cost, kDecreaseFloor) <
            cfg.tol) {
      trace.converged = true;
      polishing = true;
      polish_left = kPolishSweeps;
      continue;
    }
    prev_cost = cost;
  }

  // The identity-based estimate is unreliable near the optimum; report the
  // directly computed residual for the final iterate.
  trace.cost.back() = (m - reconstruct(f)).norm();
  return {std::move(f), std::move(trace)};
}

double subspace_distance(const StiefelPoint& u1, const StiefelPoint& u2) {
  if (u1.q.rows() != u2.q.rows() || u1.q.cols() != u2.q.cols())
    throw ShapeMismatchError("subspace_distance: frames of unequal shape");
  // ||u1 u1^T - u2 u2^T||_F^2 = 2 sum_i sin^2(theta_i), and the projection
  // residual below has exactly that squared norm; unlike the Gram identity
  // 2r - 2||u1^T u2||^2 it does not cancel for nearby frames.
  const Matrix residual = u2.q - u1.q * (u1.q.transpose() * u2.q);
  return std::sqrt(2.0) * residual.norm();
}

Matrix reconstruct(const PolarFactors& f) {
  return f.u.q * (f.b.b * f.v.q.transpose());
}

}  // namespace frmr
