#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hwg/glasso.hpp"
#include "hwg/matrix.hpp"

namespace hwg {

class WeightMatrix;

// Descending positive tuning-parameter grid (descending so warm starts walk
// from the sparsest model down).
struct Grid {
  std::vector<double> values;

  void validate() const;
  static Grid log_spaced(double top, double bottom, std::size_t count);
};

// 30 log-spaced values from lambda_max = max_offdiag|s| / min finite weight
// down to lambda_max / 100.
Grid default_lambda_grid(const SymMatrix& s, const WeightMatrix& w,
                         std::size_t count = 30, double min_ratio = 0.01);

// BIC = -n * (log det Theta - tr(S Theta)) + log(n) * k, where k counts the
// nonzero strictly-upper-triangular entries.  Lower is better.
double bic_score(const SymMatrix& s, const SymMatrix& theta, std::size_t n);

struct SelectionPoint {
  double lambda1 = 0.0;  // the only lambda for one-parameter paths
  double lambda2 = 0.0;  // unused (NaN) for one-parameter paths
  double bic = 0.0;
  double objective = 0.0;
  std::size_t edges = 0;
  bool converged = false;
};

struct SelectionReport {
  std::vector<SelectionPoint> points;
  std::size_t chosen = 0;  // index into points; minimizes BIC among converged
  bool pair = false;
  std::string note;  // records the BIC formula and tie-break rule
};

// Fits every grid point (penalty = lambda * weights, warm-started along the
// descending path unless warm_start is false) and returns the BIC-minimizing
// fit.  Ties break toward the earlier (larger) lambda.
std::pair<FitResult, SelectionReport> select_lambda(const SymMatrix& s,
                                                    const WeightMatrix& weights,
                                                    const Grid& grid, std::size_t n,
                                                    const SolverConfig& cfg = {},
                                                    bool warm_start = true);

// Weight construction mode for the hub/non-hub penalty of the second stage.
struct PairPenaltyMode {
  bool adaptive = false;
  double gamma1 = 1.0;
  const SymMatrix* theta_tilde = nullptr;  // required when adaptive
};

// Crosses grid1 (hub-incident penalty) with grid2 (background penalty),
// builds the two-level weight matrix per pair, and returns the
// BIC-minimizing fit.  Degenerate hub sets collapse the search to one axis.
std::pair<FitResult, SelectionReport> select_lambda_pair(
    const SymMatrix& s, const std::vector<std::size_t>& hubs, const Grid& grid1,
    const Grid& grid2, std::size_t n, const SolverConfig& cfg = {},
    const PairPenaltyMode& mode = {});

}  // namespace hwg
