#include "frmr/manifold.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>
#include <string>

namespace frmr {

namespace {
// Relative cutoff below which a singular value counts as zero.
constexpr double kRankTol = 1e-12;
}  // namespace

StiefelPoint project_stiefel(const Matrix& a) {
  if (a.cols() < 1 || a.rows() < a.cols())
    throw RankDeficientError("project_stiefel: need a tall p x r input, got " +
                             std::to_string(a.rows()) + " x " +
                             std::to_string(a.cols()));
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(sv.size() - 1) <= kRankTol * sv(0))
    throw RankDeficientError(
        "project_stiefel: input has numerical rank below its column count");
  return {svd.matrixU() * svd.matrixV().transpose()};
}

SpdCandidate project_spd(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw NonSquareError("project_spd: need a square input, got " +
                         std::to_string(a.rows()) + " x " +
                         std::to_string(a.cols()));
  Matrix b = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b, Eigen::EigenvaluesOnly);
  return {std::move(b), eig.eigenvalues().minCoeff()};
}

Matrix soft_threshold(const Matrix& m, double delta) {
  if (!(delta >= 0.0))
    throw std::invalid_argument("soft_threshold: delta must be >= 0");
  return (m.array() - delta).max(0.0) + (m.array() + delta).min(0.0);
}

SvdTriplet tsvd_oracle(const Matrix& m, int r) {
  const int max_rank = static_cast<int>(std::min(m.rows(), m.cols()));
  if (r < 1 || r > max_rank)
    throw InvalidRankError("tsvd_oracle: rank " + std::to_string(r) +
                           " outside [1, " + std::to_string(max_rank) + "]");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU().leftCols(r), svd.singularValues().head(r),
          svd.matrixV().leftCols(r)};
}

}  // namespace frmr
