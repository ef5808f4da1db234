#include "frmr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/QR>

#include "frmr/rng.hpp"

namespace frmr {

SyntheticProblem generate_problem(int rows, int cols, int r,
                                  double outlier_fraction,
                                  std::uint64_t seed) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("generate_problem: empty shape");
  if (r < 1 || r > std::min(rows, cols))
    throw InvalidRankError("generate_problem: rank " + std::to_string(r) +
                           " outside [1, " +
                           std::to_string(std::min(rows, cols)) + "]");
  if (!(outlier_fraction >= 0.0 && outlier_fraction <= 1.0))
    throw InvalidFractionError(
        "generate_problem: outlier fraction must lie in [0, 1]");

  Rng rng(seed);
  Matrix a(rows, r);
  Matrix b(cols, r);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = rng.gaussian();
  for (int i = 0; i < cols; ++i)
    for (int j = 0; j < r; ++j) b(i, j) = rng.gaussian();

  SyntheticProblem p;
  p.l_true = a * b.transpose();
  p.s_true = Matrix::Zero(rows, cols);
  const auto total = static_cast<std::int64_t>(rows) * cols;
  const auto count = static_cast<std::int64_t>(
      std::llround(outlier_fraction * static_cast<double>(total)));
  for (std::int64_t idx : rng.distinct(total, count))
    p.s_true(static_cast<int>(idx / cols), static_cast<int>(idx % cols)) =
        rng.uniform(-1.0, 1.0);
  p.m = p.l_true + p.s_true;
  p.rank = r;
  p.outlier_fraction = outlier_fraction;
  p.seed = seed;
  return p;
}

RecoveryMetrics recovery_errors(const SyntheticProblem& p,
                                const Decomposition& d, double epsilon) {
  if (d.l.rows() != p.m.rows() || d.l.cols() != p.m.cols() ||
      d.s.rows() != p.m.rows() || d.s.cols() != p.m.cols())
    throw ShapeMismatchError("recovery_errors: decomposition does not match");
  RecoveryMetrics out;
  out.err_l = relative_or_absolute((d.l - p.l_true).norm(), p.l_true.norm());
  out.err_s = relative_or_absolute((d.s - p.s_true).norm(), p.s_true.norm());
  out.phase_err = phase_metric(d.s, p.s_true, epsilon);
  out.iterations = d.iterations;
  return out;
}

double phase_metric(const Matrix& s_est, const Matrix& s_true,
                    double epsilon) {
  if (s_est.rows() != s_true.rows() || s_est.cols() != s_true.cols())
    throw ShapeMismatchError("phase_metric: shapes differ");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("phase_metric: epsilon must be positive");
  const Eigen::ArrayXXd dev = (s_est - s_true).array().abs();
  const double sum = (dev > epsilon).select(dev, 0.0).sum();
  return sum / static_cast<double>(dev.size());
}

Matrix matrix_with_spectrum(int rows, int cols, const Vector& sigma,
                            std::uint64_t seed) {
  const int limit = std::min(rows, cols);
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("matrix_with_spectrum: empty shape");
  if (sigma.size() < 1 || sigma.size() > limit)
    throw std::invalid_argument(
        "matrix_with_spectrum: need between 1 and min(rows, cols) values");
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (!(sigma(i) >= 0.0))
      throw std::invalid_argument(
          "matrix_with_spectrum: singular values must be nonnegative");
    if (i > 0 && sigma(i) > sigma(i - 1))
      throw std::invalid_argument(
          "matrix_with_spectrum: singular values must be nonincreasing");
  }

  const auto k = sigma.size();
  Rng rng(seed);
  Matrix gu(rows, k);
  Matrix gv(cols, k);
  for (int i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < k; ++j) gu(i, j) = rng.gaussian();
  for (int i = 0; i < cols; ++i)
    for (Eigen::Index j = 0; j < k; ++j) gv(i, j) = rng.gaussian();
  const Matrix qu = Eigen::HouseholderQR<Matrix>(gu)
                        .householderQ() *
                    Matrix::Identity(rows, k);
  const Matrix qv = Eigen::HouseholderQR<Matrix>(gv)
                        .householderQ() *
                    Matrix::Identity(cols, k);
  return qu * sigma.asDiagonal() * qv.transpose();
}

}  // namespace frmr
