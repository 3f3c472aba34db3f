#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hwg/compositional.hpp"
#include "hwg/evaluation.hpp"
#include "hwg/netgen.hpp"
#include "hwg/weights.hpp"

namespace hwg {

enum class Method { glasso, ada_glasso, hw_glasso, two_step, two_step_known };
std::string method_to_string(Method m);
Method method_from_string(const std::string& s);

struct ExperimentConfig {
  Mechanism mechanism = Mechanism::i;
  std::size_t n = 100;
  std::size_t p = 50;
  std::size_t replicates = 100;
  std::vector<Method> methods = {Method::glasso, Method::ada_glasso, Method::hw_glasso,
                                 Method::two_step, Method::two_step_known};
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  InitialEstimator init = InitialEstimator::ridge_auto();
  std::size_t grid_size = 30;
  double grid_min_ratio = 0.01;
  std::size_t pair_grid_size = 10;
  double k_percent = 10.0;
  HubRule hub_rule = HubRule::threshold;
  SolverConfig solver;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct AggregateCell {
  double mean = 0.0;
  double se = 0.0;
  bool se_defined = false;
};

struct AggregateRow {
  Method method;
  AggregateCell tpr, tnr, hub_edge_pct, hub_node_pct, nonhub_node_pct, edges, frobenius,
      frobenius_full;
  std::size_t replicates_used = 0;
};

struct ReplicateRecord {
  std::size_t replicate = 0;
  Method method;
  bool ok = false;
  std::string error;
  MetricsReport metrics;
  double kkt = 0.0;
  double lambda1 = 0.0;  // chosen tuning value(s)
  double lambda2 = 0.0;
  std::uint64_t data_checksum = 0;
};

struct ExperimentResult {
  std::vector<AggregateRow> rows;       // one per method, config order
  std::vector<ReplicateRecord> log;     // replicate-major, method order
  std::size_t failed_replicates = 0;
  double max_kkt = 0.0;
};

// One replicate: generate the network from (seed, r), sample one data set,
// fit every configured method on that same data, and score against the
// truth.  More than 10% failed replicates fails the whole run.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Error decay and support shrinkage of the hub-weighted estimator over a
// sample-size sweep on a fixed mechanism.
struct RatePoint {
  std::size_t n = 0;
  double mean_frobenius_error = 0.0;  // ||theta_hat - theta0||_F
  double mean_zero_fraction = 0.0;    // truly-zero pairs estimated exactly zero
  std::size_t replicates_used = 0;
};
std::vector<RatePoint> rate_experiment(Mechanism mechanism, std::size_t p,
                                       const std::vector<std::size_t>& n_list,
                                       std::size_t replicates, std::uint64_t seed,
                                       const ExperimentConfig& base = {});

std::uint64_t data_checksum(const DataMatrix& data);

}  // namespace hwg
