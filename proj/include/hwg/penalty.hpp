#pragma once

#include <cmath>
#include <limits>

#include "hwg/matrix.hpp"

namespace hwg {

// Symmetric per-element penalty rho_ij >= 0 with +inf marking entries that
// are excluded outright (hard zeros in the estimate).  The diagonal is never
// penalized and stays exactly 0.
class PenaltyMatrix {
 public:
  PenaltyMatrix() = default;
  explicit PenaltyMatrix(std::size_t p) : p_(p), rho_(p * p, 0.0) {}

  static PenaltyMatrix uniform(std::size_t p, double rho) {
    PenaltyMatrix m(p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < i; ++j) m.set(i, j, rho);
    return m;
  }

  std::size_t dim() const { return p_; }

  double operator()(std::size_t i, std::size_t j) const { return rho_[i * p_ + j]; }

  bool infinite(std::size_t i, std::size_t j) const {
    return std::isinf(rho_[i * p_ + j]);
  }

  void set(std::size_t i, std::size_t j, double x) {
    if (i == j) {
      if (x != 0.0) throw data_error("penalty diagonal must be zero");
      return;
    }
    if (std::isnan(x) || x < 0.0) throw data_error("penalty entries must be >= 0");
    rho_[i * p_ + j] = x;
    rho_[j * p_ + i] = x;
  }

  static constexpr double inf() { return std::numeric_limits<double>::infinity(); }

 private:
  std::size_t p_ = 0;
  std::vector<double> rho_;
};

}  // namespace hwg
