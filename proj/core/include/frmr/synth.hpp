#pragma once

#include <cstdint>

#include "frmr/decomp.hpp"

namespace frmr {

// Planted low-rank + sparse instance: l_true = a b^T with standard normal
// factors, s_true holds round(outlier_fraction * m * n) uniform values in
// [-1, 1] on distinct positions, m = l_true + s_true.
struct SyntheticProblem {
  Matrix m;
  Matrix l_true;
  Matrix s_true;
  int rank = 0;
  double outlier_fraction = 0.0;
  std::uint64_t seed = 0;
};

struct RecoveryMetrics {
  double err_l = 0.0;     // ||l - l_true||_F / ||l_true||_F
  double err_s = 0.0;
  double phase_err = 0.0; // phase_metric at the given epsilon
  double wall_time_s = 0.0;  // filled by the caller that timed the solve
  int iterations = 0;
};

SyntheticProblem generate_problem(int rows, int cols, int r,
                                  double outlier_fraction, std::uint64_t seed);

RecoveryMetrics recovery_errors(const SyntheticProblem& p,
                                const Decomposition& d, double epsilon = 1e-3);

// Mean entrywise deviation |s_est - s_true| with deviations <= epsilon
// zeroed, so a recovered support scores exactly zero.
double phase_metric(const Matrix& s_est, const Matrix& s_true, double epsilon);

// Dense matrix with the given singular values (sorted nonincreasing,
// nonnegative) and seeded random orthonormal factors.
Matrix matrix_with_spectrum(int rows, int cols, const Vector& sigma,
                            std::uint64_t seed);

}  // namespace frmr
