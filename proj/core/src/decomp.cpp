#include "frmr/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "frmr/manifold.hpp"
#include "frmr/rng.hpp"

namespace frmr {

namespace {

void validate_adm_config(const AdmConfig& cfg, const char* who) {
  const std::string name(who);
  if (!(cfg.mu0 > 0.0))
    throw std::invalid_argument(name + ": mu0 must be positive");
  if (!(cfg.rho > 1.0))
    throw std::invalid_argument(name + ": rho must exceed 1");
  if (!(cfg.mu_bar >= cfg.mu0))
    throw std::invalid_argument(name + ": mu_bar must be at least mu0");
  if (!(cfg.tol_primal > 0.0))
    throw std::invalid_argument(name + ": tol_primal must be positive");
  if (cfg.max_iter < 1)
    throw std::invalid_argument(name + ": max_iter must be at least 1");
}

void validate_rank(const Matrix& m, int r, const char* who) {
  const auto limit = std::min(m.rows(), m.cols());
  if (r < 1 || r > limit)
    throw InvalidRankError(std::string(who) + ": rank " + std::to_string(r) +
                           " outside [1, " + std::to_string(limit) + "]");
}

PolarFactors factors_from_svd(const SvdTriplet& t) {
  return {StiefelPoint{t.u},
          SpdCandidate{Matrix(t.sigma.asDiagonal()),
                       t.sigma.size() ? t.sigma.minCoeff() : 0.0},
          StiefelPoint{t.v}};
}

// Alternating scheme over (L, S, Y): the L update is a single polar sweep
// (or a truncated SVD when exact_low_rank is set) on M - S + Y/mu, S is the
// elementwise shrink of M - L + Y/mu, and mu grows geometrically up to
// mu_bar. Terminates on the relative primal residual.
Decomposition adm_loop(const Matrix& m, int r, const AdmConfig& cfg,
                       bool exact_low_rank, const char* who) {
  require_finite(m, who);
  validate_rank(m, r, who);
  validate_adm_config(cfg, who);

  Decomposition d;
  d.l = Matrix::Zero(m.rows(), m.cols());
  d.s = Matrix::Zero(m.rows(), m.cols());
  d.y = Matrix::Zero(m.rows(), m.cols());
  d.factors = identity_factors(static_cast<int>(m.rows()),
                               static_cast<int>(m.cols()), r);

  const double m_norm = m.norm();
  if (m_norm == 0.0) {
    d.converged = true;
    return d;
  }

  double mu = cfg.mu0;
  Matrix arg(m.rows(), m.cols());
  Matrix residual(m.rows(), m.cols());
  for (int k = 1; k <= cfg.max_iter; ++k) {
    arg = m - d.s + d.y / mu;
    if (exact_low_rank) {
      d.factors = factors_from_svd(tsvd_oracle(arg, r));
    } else {
      d.factors = fixed_rank_opt_step(arg, d.factors);
    }
    d.l = reconstruct(d.factors);
    d.s = soft_threshold(m - d.l + d.y / mu, 1.0 / mu);
    residual = m - d.l - d.s;
    d.y += mu * residual;
    d.mu_history.push_back(mu);
    const double rel = residual.norm() / m_norm;
    d.primal_residual_history.push_back(rel);
    d.iterations = k;
    mu = std::min(cfg.mu_bar, cfg.rho * mu);
    if (rel < cfg.tol_primal) {
      d.converged = true;
      break;
    }
  }
  return d;
}

}  // namespace

Decomposition fr_adm(const Matrix& m, int r, const AdmConfig& cfg) {
  return adm_loop(m, r, cfg, cfg.projection == Projection::kExactTsvd,
                  "fr_adm");
}

Decomposition fr_adm_exact(const Matrix& m, int r, const AdmConfig& cfg) {
  return adm_loop(m, r, cfg, true, "fr_adm_exact");
}

Decomposition fr_nys(const Matrix& m, int r, const AdmConfig& cfg,
                     const NystromConfig& nys) {
  require_finite(m, "fr_nys");
  validate_rank(m, r, "fr_nys");
  validate_adm_config(cfg, "fr_nys");
  if (nys.oversample_k < 1)
    throw std::invalid_argument("fr_nys: oversample_k must be at least 1");
  if (!(nys.pinv_threshold > 0.0))
    throw std::invalid_argument("fr_nys: pinv_threshold must be positive");
  const long width = static_cast<long>(nys.oversample_k) * r;
  if (width > std::min(m.rows(), m.cols()))
    throw std::invalid_argument(
        "fr_nys: sketch width " + std::to_string(width) + " exceeds min(" +
        std::to_string(m.rows()) + ", " + std::to_string(m.cols()) + ")");

  // Shuffle rows so structured outlier patterns cannot concentrate in the
  // sampled blocks.
  Rng rng(nys.shuffle_seed);
  const std::vector<int> perm = rng.permutation(static_cast<int>(m.rows()));
  Matrix shuffled(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) shuffled.row(i) = m.row(perm[i]);

  const Matrix left_block = shuffled.leftCols(width);
  const Matrix top_block = shuffled.topRows(width);
  const bool exact = cfg.projection == Projection::kExactTsvd;
  auto top_future = std::async(std::launch::async, [&top_block, r, &cfg, exact] {
    return adm_loop(top_block, r, cfg, exact, "fr_nys");
  });
  Decomposition left = adm_loop(left_block, r, cfg, exact, "fr_nys");
  Decomposition top = top_future.get();

  // L = L_left pinv(corner) L_top with the corner taken from the left
  // solve's own iterate; collapsing through the factors keeps everything
  // rank r. The corner of a rank-r L_left has at most r significant
  // singular values, so the threshold only rejects genuinely deficient
  // blocks.
  const Matrix corner = left.l.topRows(width);
  Eigen::BDCSVD<Matrix> corner_svd(corner,
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = corner_svd.singularValues();
  const double sv_max = sv.size() > 0 ? sv(0) : 0.0;
  int corner_rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > nys.pinv_threshold * sv_max) ++corner_rank;
  if (corner_rank < r)
    throw BlockRankDeficientError(
        "fr_nys: corner block has rank " + std::to_string(corner_rank) +
        ", below target rank " + std::to_string(r) +
        "; the sampled blocks miss part of the row or column space");

  const Matrix pinv_applied =
      (left.factors.v.q.transpose() * corner_svd.matrixV().leftCols(corner_rank)) *
      sv.head(corner_rank).cwiseInverse().asDiagonal() *
      (corner_svd.matrixU().leftCols(corner_rank).transpose() *
       top.factors.u.q);
  const Matrix core = left.factors.b.b * pinv_applied * top.factors.b.b;
  Eigen::JacobiSVD<Matrix> core_svd(core,
                                    Eigen::ComputeFullU | Eigen::ComputeFullV);

  Decomposition d;
  Matrix u_shuffled = left.factors.u.q * core_svd.matrixU();
  Matrix u_rows(m.rows(), r);
  for (int i = 0; i < m.rows(); ++i) u_rows.row(perm[i]) = u_shuffled.row(i);
  d.factors = {
      StiefelPoint{std::move(u_rows)},
      SpdCandidate{Matrix(core_svd.singularValues().asDiagonal()),
                   core_svd.singularValues().minCoeff()},
      StiefelPoint{top.factors.v.q * core_svd.matrixV()}};
  d.l = reconstruct(d.factors);
  d.s = m - d.l;
  d.y = Matrix::Zero(m.rows(), m.cols());
  d.iterations = std::max(left.iterations, top.iterations);
  d.converged = left.converged && top.converged;
  d.primal_residual_history = std::move(left.primal_residual_history);
  d.mu_history = std::move(left.mu_history);
  d.row_permutation = perm;
  return d;
}

KktResiduals kkt_residuals(const Matrix& m, const Decomposition& d,
                           double mu) {
  if (!(mu > 0.0))
    throw std::invalid_argument("kkt_residuals: mu must be positive");
  if (d.l.rows() != m.rows() || d.l.cols() != m.cols() ||
      d.s.rows() != m.rows() || d.s.cols() != m.cols() ||
      d.y.rows() != m.rows() || d.y.cols() != m.cols())
    throw ShapeMismatchError("kkt_residuals: decomposition does not match m");

  KktResiduals k;
  k.r_uty = (d.factors.u.q.transpose() * d.y).norm();
  k.r_yv = (d.y * d.factors.v.q).norm();
  k.r_prox = (d.s - soft_threshold(d.s + d.y / mu, 1.0 / mu)).norm();
  k.r_feas = relative_or_absolute((m - d.l - d.s).norm(), m.norm());
  return k;
}

}  // namespace frmr
