#pragma once

#include <vector>

#include "hwg/matrix.hpp"

namespace hwg {

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
class Cholesky {
 public:
  // Throws not_positive_definite when a pivot is <= kTol.pd_check.
  explicit Cholesky(const SymMatrix& a);

  // Factor without throwing; ok() reports success.
  static Cholesky attempt(const SymMatrix& a);
  bool ok() const { return ok_; }

  std::size_t dim() const { return p_; }
  double logdet() const;              // 2 * sum log L_ii
  SymMatrix inverse() const;          // exact-symmetric by construction
  void solve_in_place(std::vector<double>& b) const;  // A x = b

  double lower(std::size_t i, std::size_t j) const { return l_[i * p_ + j]; }

 private:
  Cholesky() = default;
  void factor(const SymMatrix& a);

  std::size_t p_ = 0;
  std::vector<double> l_;
  bool ok_ = false;
};

// (log det m, m^{-1}) for symmetric positive definite m.
struct LogDetInverse {
  double logdet;
  SymMatrix inverse;
};
LogDetInverse chol_logdet_inverse(const SymMatrix& m);

// Full symmetric eigendecomposition: Householder tridiagonalization followed
// by QL with implicit shifts.  Eigenvalues ascending.
struct SymEigen {
  std::vector<double> values;
  Matrix vectors;  // column k is the eigenvector for values[k]; empty if not requested
};
SymEigen sym_eigen(const SymMatrix& a, bool want_vectors = false);

// (min, max) eigenvalue.
struct EigenExtremes {
  double min;
  double max;
};
EigenExtremes eigen_extremes(const SymMatrix& m);

// Norms of the difference a - b: squared Frobenius, operator (spectral), and
// off-diagonal L1 over ordered pairs.
struct DiffNorms {
  double frobenius_sq;
  double operator_norm;
  double offdiag_l1;
};
DiffNorms matrix_norms(const SymMatrix& a, const SymMatrix& b);

}  // namespace hwg
