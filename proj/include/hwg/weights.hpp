#pragma once

#include <optional>

#include "hwg/glasso.hpp"
#include "hwg/matrix.hpp"

namespace hwg {

// Symmetric nonnegative lasso weights with +inf marking entries excluded
// outright (zero denominators in the weight formula).  Diagonal is 0.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(std::size_t p) : p_(p), w_(p * p, 0.0) {}

  static WeightMatrix uniform(std::size_t p) {
    WeightMatrix w(p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < i; ++j) w.set(i, j, 1.0);
    return w;
  }

  std::size_t dim() const { return p_; }
  double operator()(std::size_t i, std::size_t j) const { return w_[i * p_ + j]; }
  bool infinite(std::size_t i, std::size_t j) const { return std::isinf(w_[i * p_ + j]); }
  void set(std::size_t i, std::size_t j, double x) {
    if (i == j) return;
    w_[i * p_ + j] = x;
    w_[j * p_ + i] = x;
  }

  // Smallest finite off-diagonal weight; nullopt when every entry is infinite.
  std::optional<double> min_finite() const;

  // rho_ij = lambda * w_ij (inf stays inf).
  PenaltyMatrix scaled(double lambda) const;

 private:
  std::size_t p_ = 0;
  std::vector<double> w_;
};

// Initial precision-matrix estimate used to build the weights.
struct InitialEstimator {
  enum class Kind { direct_inverse, glasso, ridge_inverse, ridge_auto };
  Kind kind = Kind::ridge_auto;
  double lambda0 = 0.0;  // glasso: fixed penalty; <= 0 selects by BIC
  double alpha = 0.0;    // ridge_inverse: explicit shift (> 0)

  static InitialEstimator inverse() { return {Kind::direct_inverse, 0.0, 0.0}; }
  static InitialEstimator glasso_init(double lambda0 = 0.0) {
    return {Kind::glasso, lambda0, 0.0};
  }
  static InitialEstimator ridge(double alpha) {
    return {Kind::ridge_inverse, 0.0, alpha};
  }
  static InitialEstimator ridge_auto() { return {Kind::ridge_auto, 0.0, 0.0}; }
};

// Computes the initial estimate from a covariance matrix.  n is the sample
// size behind s (used by the BIC-selected glasso initializer).  ridge_auto
// picks the smallest shift that brings the minimum eigenvalue of s + alpha I
// up to 1e-3; the shift actually applied is reported through alpha_used.
SymMatrix initial_estimate(const SymMatrix& s, std::size_t n, const InitialEstimator& init,
                           const SolverConfig& cfg = {}, double* alpha_used = nullptr);

// Hub weights from an initial estimate:
//   w_ij = 1 / ( |t_ij|^gamma1 * (||t_(-i)||_1 * ||t_(-j)||_1)^gamma2 ),
// with ||t_(-i)||_1 the off-diagonal absolute row sum.  Zero denominators
// (t_ij = 0 with gamma1 > 0, or an empty row with gamma2 > 0) become +inf.
WeightMatrix hub_lasso_weights(const SymMatrix& theta_tilde, double gamma1,
                               double gamma2);

// Classic adaptive-lasso weights: the gamma2 = 0 special case.
WeightMatrix adaptive_lasso_weights(const SymMatrix& theta_tilde, double gamma1);

void write_weights_csv(const std::string& path, const WeightMatrix& w);

}  // namespace hwg
