#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hwg/common.hpp"

namespace hwg {

// Dense row-major matrix of observations (n rows) by variables (p columns).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

  bool all_finite() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> v_;
};

// Observation matrix with optional variable labels.  At least one row and
// two variables; every value finite.
struct DataMatrix {
  Matrix values;
  std::vector<std::string> labels;  // empty or size p

  DataMatrix() = default;
  explicit DataMatrix(Matrix m, std::vector<std::string> names = {});

  std::size_t n() const { return values.rows(); }
  std::size_t p() const { return values.cols(); }
};

// Symmetric p x p matrix stored full dense; set() mirrors both triangles so
// m(i,j) == m(j,i) holds bitwise.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t p, double fill = 0.0) : p_(p), v_(p * p, fill) {}

  static SymMatrix identity(std::size_t p);
  // Validates exact symmetry and finiteness of a full matrix.
  static SymMatrix from_full(const Matrix& m);

  std::size_t dim() const { return p_; }

  double operator()(std::size_t i, std::size_t j) const { return v_[i * p_ + j]; }
  void set(std::size_t i, std::size_t j, double x) {
    v_[i * p_ + j] = x;
    v_[j * p_ + i] = x;
  }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

  bool all_finite() const;

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.p_ == b.p_ && a.v_ == b.v_;
  }

 private:
  std::size_t p_ = 0;
  std::vector<double> v_;
};

// --- moments -------------------------------------------------------------

// Sample covariance.  Uncentered mode computes sum_i x_i x_i' / n (the
// mean-zero model's statistic); centered mode subtracts column means first,
// still with divisor n.
SymMatrix sample_covariance(const DataMatrix& data, bool center);

// Sample correlation matrix plus the per-column standard deviations
// (divisor n, consistent with sample_covariance).
struct Correlation {
  SymMatrix r;
  std::vector<double> sd;
};
Correlation sample_correlation(const DataMatrix& data);

// --- CSV -----------------------------------------------------------------

// Dense numeric CSV.  Header row optional on read (detected); values are
// validated finite.  Writing uses 17 significant digits so round-trips are
// exact; infinities are written as "inf"/"-inf" when allow_inf is set.
Matrix read_matrix_csv(const std::string& path, std::vector<std::string>* header = nullptr,
                       bool allow_inf = false);
void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header = {});

SymMatrix read_sym_csv(const std::string& path, bool allow_inf = false);
void write_sym_csv(const std::string& path, const SymMatrix& m,
                   const std::vector<std::string>& header = {});

std::string format_double(double x);

}  // namespace hwg
