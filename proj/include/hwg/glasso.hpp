#pragma once

#include <vector>

#include "hwg/linalg.hpp"
#include "hwg/matrix.hpp"
#include "hwg/penalty.hpp"

namespace hwg {

struct SolverConfig {
  double outer_tol = 1e-5;   // mean |dSigma offdiag| relative to mean |s offdiag|
  double inner_tol = 1e-6;   // lasso coordinate-change threshold, same scaling
  int max_outer = 200;
  int max_inner = 1000;
  double diag_jitter = 0.0;  // added to the covariance diagonal
  double kkt_target = 1e-5;  // extra sweeps until the residual drops below this
  double jitter_escalation = 10.0;  // growth factor on PD failure (from 1e-8)
  int max_jitter_retries = 3;
  bool screen = true;        // exact block-diagonal decomposition before solving
};

struct FitResult {
  SymMatrix theta;   // estimated precision matrix
  SymMatrix sigma;   // solver's working covariance (approx theta^{-1})
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double kkt_violation = 0.0;
  double jitter_used = 0.0;
};

// Warm-start state carried along a penalty path: working covariance plus the
// per-column lasso coefficients (beta(i,j) = coefficient of variable i in
// column j's subproblem).
struct WarmStart {
  SymMatrix sigma;
  Matrix beta;
  bool valid = false;
};

// Maximizes  log det(Theta) - tr(s Theta) - sum_{i != j} rho_ij |theta_ij|
// over positive definite Theta by block coordinate descent, one lasso
// subproblem per column.  The penalty runs over ordered pairs (both
// symmetric copies), the usual convention for a symmetric penalty matrix;
// at the optimum sigma_ij = s_ij + rho_ij sign(theta_ij).  Entries with
// rho_ij = +inf are constrained to exactly zero.  The diagonal is
// unpenalized: sigma_ii is held at s_ii + jitter throughout.
FitResult fit_weighted_glasso(const SymMatrix& s, const PenaltyMatrix& penalty,
                              const SolverConfig& cfg = {},
                              const WarmStart* warm = nullptr,
                              WarmStart* warm_out = nullptr);

// Maximal first-order violation of the penalized objective at theta, with
// sigma-hat = theta^{-1}:
//   off-diagonal, theta_ij != 0:  |s_ij - sigma_ij + rho_ij sign(theta_ij)|
//   off-diagonal, theta_ij == 0:  max(0, |s_ij - sigma_ij| - rho_ij)
//   diagonal:                     |s_ii - sigma_ii|
double kkt_residual(const SymMatrix& s, const SymMatrix& theta,
                    const PenaltyMatrix& penalty);

// Connected components of the graph with an edge wherever |s_ij| > rho_ij.
// Solving each component separately reproduces the full solution exactly.
std::vector<std::vector<std::size_t>> block_screen(const SymMatrix& s,
                                                   const PenaltyMatrix& penalty);

// Fits on the sample correlation matrix and rescales back by the inverse
// standard deviations: theta*_ij = k_ij / (sd_i sd_j).  objective and
// kkt_violation describe the correlation-scale problem actually solved.
FitResult fit_correlation_based(const DataMatrix& data, const PenaltyMatrix& penalty,
                                const SolverConfig& cfg = {});

// Penalized log-likelihood value at theta (the quantity the solver maximizes).
double glasso_objective(const SymMatrix& s, const SymMatrix& theta,
                        const PenaltyMatrix& penalty);

// Nonzero strictly-upper-triangle count of an estimate.
std::size_t edge_count(const SymMatrix& theta);

}  // namespace hwg
