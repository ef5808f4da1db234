#pragma once

#include <cstdint>

#include <Eigen/QR>

#include "frmr/matrix.hpp"
#include "frmr/rng.hpp"

namespace frmr::test {

inline Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.gaussian();
  return g;
}

// Orthonormal p x r frame built with Householder QR, independent of the
// SVD-based projector under test.
inline Matrix orthonormal_qr(int p, int r, std::uint64_t seed) {
  Matrix g = gaussian_matrix(p, r, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(p, r);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double rel_diff(const Matrix& a, const Matrix& ref) {
  const double d = (a - ref).norm();
  const double n = ref.norm();
  return n > 0.0 ? d / n : d;
}

}  // namespace frmr::test
