#include "hwg/weights.hpp"

#include <cmath>

#include "hwg/selection.hpp"

namespace hwg {

std::optional<double> WeightMatrix::min_finite() const {
  std::optional<double> best;
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double x = w_[i * p_ + j];
      if (std::isfinite(x) && (!best || x < *best)) best = x;
    }
  return best;
}

PenaltyMatrix WeightMatrix::scaled(double lambda) const {
  if (!(lambda >= 0.0)) throw data_error("lambda must be >= 0");
  PenaltyMatrix rho(p_);
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double w = w_[i * p_ + j];
      rho.set(i, j, std::isinf(w) ? w : lambda * w);
    }
  return rho;
}

SymMatrix initial_estimate(const SymMatrix& s, std::size_t n, const InitialEstimator& init,
                           const SolverConfig& cfg, double* alpha_used) {
  if (alpha_used) *alpha_used = 0.0;
  switch (init.kind) {
    case InitialEstimator::Kind::direct_inverse: {
      Cholesky c = Cholesky::attempt(s);
      if (!c.ok())
        throw data_error(
            "sample covariance is singular; the direct inverse initializer "
            "needs n > p (use a ridge initializer instead)");
      return c.inverse();
    }
    case InitialEstimator::Kind::ridge_inverse:
    case InitialEstimator::Kind::ridge_auto: {
      double alpha = init.alpha;
      if (init.kind == InitialEstimator::Kind::ridge_auto) {
        // strong scale-aware shrinkage: the estimate only feeds the weights,
        // and a noisy inverse washes out the hub signal
        double mean_var = 0.0;
        for (std::size_t i = 0; i < s.dim(); ++i) mean_var += s(i, i);
        mean_var /= static_cast<double>(s.dim());
        double lmin = eigen_extremes(s).min;
        alpha = std::max(1e-3 - lmin, 4.0 * mean_var);
      } else if (!(alpha > 0.0)) {
        throw data_error("ridge initializer needs alpha > 0");
      }
      if (alpha_used) *alpha_used = alpha;
      SymMatrix shifted = s;
      for (std::size_t i = 0; i < s.dim(); ++i) shifted.set(i, i, s(i, i) + alpha);
      return Cholesky(shifted).inverse();
    }
    case InitialEstimator::Kind::glasso: {
      WeightMatrix w = WeightMatrix::uniform(s.dim());
      if (init.lambda0 > 0.0) {
        FitResult fit = fit_weighted_glasso(s, w.scaled(init.lambda0), cfg);
        return fit.theta;
      }
      Grid grid = default_lambda_grid(s, w);
      auto [fit, report] = select_lambda(s, w, grid, n, cfg);
      return fit.theta;
    }
  }
  throw error("unreachable");
}

WeightMatrix hub_lasso_weights(const SymMatrix& theta_tilde, double gamma1,
                               double gamma2) {
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0))
    throw data_error("weight exponents must be >= 0");
  const std::size_t p = theta_tilde.dim();
  std::vector<double> rowsum(p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t k = 0; k < p; ++k)
      if (k != i) rowsum[i] += std::abs(theta_tilde(i, k));

  WeightMatrix w(p);
  const double inf = PenaltyMatrix::inf();
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double t = std::abs(theta_tilde(i, j));
      double denom = 1.0;
      bool degenerate = false;
      if (gamma1 > 0.0) {
        if (t == 0.0)
          degenerate = true;
        else
          denom *= std::pow(t, gamma1);
      }
      if (gamma2 > 0.0) {
        double prod = rowsum[i] * rowsum[j];
        if (prod == 0.0)
          degenerate = true;
        else
          denom *= std::pow(prod, gamma2);
      }
      w.set(i, j, degenerate ? inf : 1.0 / denom);
    }
  return w;
}

WeightMatrix adaptive_lasso_weights(const SymMatrix& theta_tilde, double gamma1) {
  return hub_lasso_weights(theta_tilde, gamma1, 0.0);
}

void write_weights_csv(const std::string& path, const WeightMatrix& w) {
  Matrix full(w.dim(), w.dim());
  for (std::size_t i = 0; i < w.dim(); ++i)
    for (std::size_t j = 0; j < w.dim(); ++j) full(i, j) = w(i, j);
  write_matrix_csv(path, full);
}

}  // namespace hwg
