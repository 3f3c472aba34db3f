#pragma once

#include "hwg/netgen.hpp"

namespace hwg {

// Support-recovery rates against the truth.  The positive-rate sum runs over
// i <= j (diagonal included); the negative-rate sum over i < j only.  A zero
// denominator yields the convention value 1 and sets the matching flag.
struct ConfusionMetrics {
  double tpr = 1.0;
  double tnr = 1.0;
  std::size_t edge_count = 0;
  bool tpr_undefined = false;
  bool tnr_undefined = false;
};
ConfusionMetrics confusion_metrics(const SymMatrix& theta_hat, const SymMatrix& theta0);

// Hub recovery percentages; estimated hubs come from the degree threshold
// rule applied to theta_hat.
struct HubMetrics {
  double hub_edge_pct = 0.0;
  double hub_node_pct = 0.0;
  double nonhub_node_pct = 0.0;
  bool hub_undefined = false;  // no true hubs (or no true hub edges)
};
HubMetrics hub_metrics(const SymMatrix& theta_hat, const SymMatrix& theta0,
                       const HubSet& true_hubs, double k_percent = 10.0);

// (1/p) * sum_{i != j} (theta_hat_ij - theta0_ij)^2 over ordered pairs;
// diagonal excluded.
double frobenius_measure(const SymMatrix& theta_hat, const SymMatrix& theta0);

// Everything a simulation replicate reports for one method.  frobenius is
// the off-diagonal measure above; frobenius_full keeps the trace-norm
// variant (1/p)||theta_hat - theta0||_F^2 with the diagonal included.
struct MetricsReport {
  double tpr = 0.0;
  double tnr = 0.0;
  double hub_edge_pct = 0.0;
  double hub_node_pct = 0.0;
  double nonhub_node_pct = 0.0;
  double edge_count = 0.0;
  double frobenius = 0.0;
  double frobenius_full = 0.0;
};
MetricsReport evaluate_fit(const SymMatrix& theta_hat, const NetworkSpec& truth,
                           double k_percent = 10.0);

// Structural summaries of an unweighted graph.
struct GraphStats {
  double density = 0.0;
  double global_clustering = 0.0;          // 3 * triangles / connected triples
  double avg_path_length = 0.0;            // over connected pairs only
  bool apl_defined = false;
  bool has_disconnected_pairs = false;
  std::vector<double> betweenness;         // normalized by (p-1)(p-2)/2
  std::vector<double> degree_centrality;   // degree / (p-1)
};
GraphStats graph_stats(const Adjacency& a);

// The estimate's graph: an edge wherever |theta_ij| exceeds the edge
// tolerance.
Adjacency estimate_graph(const SymMatrix& theta);

}  // namespace hwg
