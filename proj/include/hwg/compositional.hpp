#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hwg/evaluation.hpp"
#include "hwg/selection.hpp"
#include "hwg/weights.hpp"

namespace hwg {

// Samples-by-taxa abundance table (counts or relative abundances).
struct AbundanceTable {
  Matrix values;  // nonnegative
  std::vector<std::string> taxa;        // unique, size p
  std::vector<std::string> sample_ids;  // size n

  AbundanceTable() = default;
  AbundanceTable(Matrix v, std::vector<std::string> taxa_names,
                 std::vector<std::string> ids);
};

// CSV layout: header row of taxa names, first column the sample id.
AbundanceTable read_abundance_csv(const std::string& path);

// Per sample: replace zeros, renormalize to proportions, then center the log
// vector.  Output rows sum to zero.
DataMatrix clr_transform(const AbundanceTable& table, double zero_replacement = 0.5);
Matrix clr_transform_rows(const Matrix& raw, double zero_replacement);

// The full one-step pipeline applied to a data matrix: covariance, initial
// estimate, hub weights, BIC-selected penalty.
struct FitRecipe {
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  InitialEstimator init = InitialEstimator::ridge_auto();
  std::size_t grid_size = 30;
  double grid_min_ratio = 0.01;
  SolverConfig solver;
  bool center = true;           // real-data path centers columns
  double fixed_lambda = 0.0;    // > 0 skips selection and fits at this lambda
};

struct RecipeFit {
  FitResult fit;
  double lambda = 0.0;  // penalty level actually used
  double alpha = 0.0;   // ridge shift actually used by the initializer
};
RecipeFit run_recipe(const DataMatrix& data, const FitRecipe& recipe);

// Edge reproducibility over row-resampled refits.
struct StabilityResult {
  SymMatrix proportion;  // fraction of successful replicates with the edge
  std::vector<std::pair<std::size_t, std::size_t>> stable_edges;  // i<j
  std::size_t replicates = 0;  // B
  double threshold = 0.8;
  std::size_t failures = 0;
};
StabilityResult bootstrap_stability(const DataMatrix& data, const FitRecipe& recipe,
                                    std::size_t B = 100, double threshold = 0.8,
                                    std::uint64_t seed = 0, int jobs = 1);

// Two-sided permutation test of network-statistic differences between two
// groups.  Permuted refits rebuild the weights from the permuted data but
// reuse each group's observed tuning level unless reselect_per_permutation
// is set.
struct PermTestResult {
  double obs_density = 0.0, obs_clustering = 0.0, obs_apl = 0.0;
  double p_density = 1.0, p_clustering = 1.0, p_apl = 1.0;
  bool apl_defined = true;
  std::vector<double> obs_degree_diff;       // per node, group A minus group B
  std::vector<double> p_degree;              // per node
  std::vector<double> obs_betweenness_diff;  // per node
  std::vector<double> p_betweenness;         // per node
  std::size_t permutations = 0;  // R
  std::size_t failures = 0;
};
PermTestResult permutation_test(const DataMatrix& group_a, const DataMatrix& group_b,
                                std::size_t R, std::uint64_t seed,
                                const FitRecipe& recipe,
                                bool reselect_per_permutation = false, int jobs = 1);

}  // namespace hwg
