#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace frmr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Failure taxonomy. Exceptions mark misuse or genuinely degenerate inputs;
// a solver that merely runs out of iterations reports that through its
// converged flag instead.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankDeficientError : Error {
  using Error::Error;
};

struct NonSquareError : Error {
  using Error::Error;
};

struct InvalidRankError : Error {
  using Error::Error;
};

struct ShapeMismatchError : Error {
  using Error::Error;
};

struct BlockRankDeficientError : Error {
  using Error::Error;
};

struct InvalidFractionError : Error {
  using Error::Error;
};

inline bool is_finite(const Matrix& m) { return m.allFinite(); }

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite())
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

// value / denom, falling back to the absolute value when the reference
// norm is zero.
inline double relative_or_absolute(double value, double denom) {
  return denom > 0.0 ? value / denom : value;
}

}  // namespace frmr
