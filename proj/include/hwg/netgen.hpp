#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hwg/matrix.hpp"
#include "hwg/two_step.hpp"

namespace hwg {

// Dense symmetric 0/1 adjacency with a zero diagonal.
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(std::size_t p) : p_(p), a_(p * p, 0) {}

  std::size_t dim() const { return p_; }
  bool operator()(std::size_t i, std::size_t j) const { return a_[i * p_ + j] != 0; }
  void add_edge(std::size_t i, std::size_t j) {
    if (i == j) return;
    a_[i * p_ + j] = 1;
    a_[j * p_ + i] = 1;
  }
  std::size_t edge_count() const;
  std::vector<std::size_t> degree() const;

 private:
  std::size_t p_ = 0;
  std::vector<char> a_;
};

// Simulation ground truth.
struct NetworkSpec {
  std::size_t p = 0;
  Adjacency adjacency;
  HubSet hubs;       // planted hubs; empty for mechanisms without planting
  SymMatrix theta0;  // true precision matrix, minimum eigenvalue 0.1
  std::vector<std::pair<std::size_t, std::size_t>> support;  // i<j with theta0 != 0
};

enum class Mechanism { i, ii, iii, scale_free };
Mechanism mechanism_from_string(const std::string& s);
std::string mechanism_to_string(Mechanism m);

// Hub-and-background wiring: floor(p/25) hubs chosen uniformly, hub-incident
// pairs Bernoulli(0.8), then every pair i<j OR-ed with Bernoulli(0.01).
std::pair<Adjacency, HubSet> gen_adjacency_i(std::size_t p, std::uint64_t seed);

// Same layout with hub probability 0.3.
std::pair<Adjacency, HubSet> gen_adjacency_ii(std::size_t p, std::uint64_t seed);

// Two independent p/2 blocks wired like (i) with background probability 0.04,
// joined by cross-block edges with probability 0.01.
std::pair<Adjacency, HubSet> gen_adjacency_iii(std::size_t p, std::uint64_t seed);

// Preferential-attachment tree (one edge per new node, attachment probability
// proportional to degree).  No planted hubs; hubs are defined post hoc by the
// degree threshold rule.
std::pair<Adjacency, HubSet> gen_scale_free(std::size_t p, std::uint64_t seed);

// Edge magnitudes uniform on [0.5, 0.8] with a fair sign coin, zero diagonal,
// then shift the diagonal so the minimum eigenvalue is exactly 0.1.
SymMatrix adjacency_to_precision(const Adjacency& a, std::uint64_t seed);

NetworkSpec generate_network(Mechanism m, std::size_t p, std::uint64_t seed);

// n draws from N(0, theta0^{-1}), rows are observations.
DataMatrix sample_gaussian(const SymMatrix& theta0, std::size_t n, std::uint64_t seed);

// Directory layout: adjacency.csv, theta0.csv, hubs.json, meta.json.
void write_network_dir(const std::string& dir, const NetworkSpec& net,
                       Mechanism m, std::uint64_t seed);
NetworkSpec read_network_dir(const std::string& dir);

}  // namespace hwg
