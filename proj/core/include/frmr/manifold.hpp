#pragma once

#include "frmr/matrix.hpp"

namespace frmr {

// Column-orthonormal p x r frame.
struct StiefelPoint {
  Matrix q;
};

// Symmetrized square matrix together with its smallest eigenvalue. The
// eigenvalue is a diagnostic only; callers decide whether indefiniteness
// matters for them.
struct SpdCandidate {
  Matrix b;
  double min_eigenvalue = 0.0;
};

// Leading r-dimensional spectral factors, sigma sorted nonincreasing.
struct SvdTriplet {
  Matrix u;      // m x r
  Vector sigma;  // r
  Matrix v;      // n x r
};

// Nearest column-orthonormal frame to a (p x r, p >= r): Q S^T from the
// thin SVD a = Q Sigma S^T. Throws RankDeficientError when
// sigma_r <= 1e-12 * sigma_1.
StiefelPoint project_stiefel(const Matrix& a);

// Nearest symmetric matrix, 0.5 * (a + a^T). Throws NonSquareError.
SpdCandidate project_spd(const Matrix& a);

// Entrywise shrinkage max(0, m - delta) + min(0, m + delta), delta >= 0.
Matrix soft_threshold(const Matrix& m, double delta);

// Best rank-r factors via a dense SVD; the reference the iterative solvers
// are checked against. Throws InvalidRankError unless 1 <= r <= min(m, n).
SvdTriplet tsvd_oracle(const Matrix& m, int r);

}  // namespace frmr
