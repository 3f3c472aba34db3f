#pragma once

#include <cstdint>
#include <vector>

#include "hwg/glasso.hpp"
#include "hwg/selection.hpp"

namespace hwg {

struct HubSet {
  enum class Method { threshold, kmeans, known, planted };
  std::vector<std::size_t> indices;  // ascending, no duplicates
  Method method = Method::known;

  bool contains(std::size_t i) const;
};

// Node degrees of an estimate: number of off-diagonal nonzeros per row.
std::vector<std::size_t> degrees(const SymMatrix& theta);

// A node is a hub when its degree exceeds k_percent% of the other p-1 nodes.
HubSet identify_hubs_threshold(const SymMatrix& theta, double k_percent = 10.0);

// Two-group clustering of the degree vector; the cluster with the larger
// mean degree is the hub group.  Exact search over sorted splits for
// p <= 25, seeded Lloyd restarts above.  Returns an empty set when the two
// cluster means coincide (all degrees equal).
HubSet identify_hubs_kmeans(const SymMatrix& theta, std::uint64_t seed = 0);

enum class TwoStepWeightMode { flat, adaptive };

// Two-level penalty: lambda1 on entries touching a hub, lambda2 elsewhere,
// zero diagonal.  Adaptive mode additionally divides by |theta_tilde_ij|^g1
// (infinite where the initial estimate is zero).
PenaltyMatrix two_step_penalty(const HubSet& hubs, std::size_t p, double lambda1,
                               double lambda2, TwoStepWeightMode mode,
                               const SymMatrix* theta_tilde = nullptr,
                               double gamma1 = 1.0);

enum class HubRule { threshold, kmeans, known };

struct TwoStepResult {
  FitResult fit;
  HubSet hubs;
  SelectionReport report;
};

// Second stage: identify candidate hubs from a converged first-stage fit
// (or take them as given), then select (lambda1, lambda2) by BIC.
TwoStepResult fit_two_step(const SymMatrix& s, const FitResult& first_fit,
                           HubRule rule, double k_percent, const Grid& grid1,
                           const Grid& grid2, std::size_t n,
                           const SolverConfig& cfg = {},
                           const HubSet* known_hubs = nullptr,
                           std::uint64_t seed = 0,
                           TwoStepWeightMode mode = TwoStepWeightMode::flat,
                           const SymMatrix* theta_tilde = nullptr,
                           double gamma1 = 1.0);

}  // namespace hwg
