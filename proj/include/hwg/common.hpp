#pragma once

#include <stdexcept>
#include <string>

namespace hwg {

// Error taxonomy; the CLI maps these onto distinct exit codes.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad inputs: dimensions, non-finite values, malformed files.
struct data_error : error {
  using error::error;
};

struct dimension_mismatch : data_error {
  using data_error::data_error;
};

// Cholesky failure on a matrix that was required to be positive definite.
struct not_positive_definite : data_error {
  using data_error::data_error;
};

// Solver exhausted its iteration budget.
struct convergence_error : error {
  using error::error;
};

// Numeric thresholds shared across modules.
struct Tolerances {
  double pd_check = 0.0;            // Cholesky pivot must exceed this
  double inverse_residual = 1e-10;  // ||m * inverse(m) - I||_max allowed
  double nonzero = 1e-8;            // |x| above this counts as an edge
  double kkt = 1e-4;                // acceptable first-order violation
};

inline constexpr Tolerances kTol{};

inline bool is_nonzero(double x) { return x > kTol.nonzero || x < -kTol.nonzero; }

}  // namespace hwg
