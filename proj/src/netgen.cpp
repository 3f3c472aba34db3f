#include "hwg/netgen.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "hwg/io.hpp"
#include "hwg/linalg.hpp"
#include "hwg/rng.hpp"

namespace hwg {

namespace {
// stream purposes, fixed so replicate streams never collide
constexpr std::uint64_t kPurposeWiring = 1;
constexpr std::uint64_t kPurposeCross = 2;
constexpr std::uint64_t kPurposeOmega = 3;
constexpr std::uint64_t kPurposeGauss = 4;
}  // namespace

std::size_t Adjacency::edge_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (a_[i * p_ + j]) ++n;
  return n;
}

std::vector<std::size_t> Adjacency::degree() const {
  std::vector<std::size_t> d(p_, 0);
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (a_[i * p_ + j]) {
        ++d[i];
        ++d[j];
      }
  return d;
}

Mechanism mechanism_from_string(const std::string& s) {
  if (s == "i") return Mechanism::i;
  if (s == "ii") return Mechanism::ii;
  if (s == "iii") return Mechanism::iii;
  if (s == "iv" || s == "scale-free") return Mechanism::scale_free;
  throw data_error("unknown mechanism '" + s + "' (expected i, ii, iii or iv)");
}

std::string mechanism_to_string(Mechanism m) {
  switch (m) {
    case Mechanism::i: return "i";
    case Mechanism::ii: return "ii";
    case Mechanism::iii: return "iii";
    case Mechanism::scale_free: return "iv";
  }
  return "?";
}

namespace {

// Shared wiring for the hub mechanisms: pick floor(p/25) hubs, connect
// hub-incident pairs with hub_prob, then OR background edges over all pairs.
std::pair<Adjacency, HubSet> hub_background(std::size_t p, Rng& rng, double hub_prob,
                                            double bg_prob) {
  std::size_t n_hubs = p / 25;
  auto picked = rng.sample_indices(p, n_hubs);
  std::sort(picked.begin(), picked.end());
  std::vector<char> is_hub(p, 0);
  for (std::size_t h : picked) is_hub[h] = 1;

  Adjacency a(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if ((is_hub[i] || is_hub[j]) && rng.bernoulli(hub_prob)) a.add_edge(i, j);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (rng.bernoulli(bg_prob)) a.add_edge(i, j);

  HubSet h;
  h.method = HubSet::Method::planted;
  h.indices = std::move(picked);
  return {std::move(a), std::move(h)};
}

}  // namespace

std::pair<Adjacency, HubSet> gen_adjacency_i(std::size_t p, std::uint64_t seed) {
  if (p < 25) throw data_error("mechanism i needs p >= 25 (floor(p/25) hubs)");
  Rng rng(derive_stream(seed, 0, kPurposeWiring));
  return hub_background(p, rng, 0.8, 0.01);
}

std::pair<Adjacency, HubSet> gen_adjacency_ii(std::size_t p, std::uint64_t seed) {
  if (p < 25) throw data_error("mechanism ii needs p >= 25 (floor(p/25) hubs)");
  Rng rng(derive_stream(seed, 0, kPurposeWiring));
  return hub_background(p, rng, 0.3, 0.01);
}

std::pair<Adjacency, HubSet> gen_adjacency_iii(std::size_t p, std::uint64_t seed) {
  if (p % 2 != 0) throw data_error("mechanism iii needs an even p (two p/2 blocks)");
  std::size_t half = p / 2;
  if (half < 25) throw data_error("mechanism iii needs p/2 >= 25");

  Rng rng1(derive_stream(seed, 1, kPurposeWiring));
  Rng rng2(derive_stream(seed, 2, kPurposeWiring));
  auto [a1, h1] = hub_background(half, rng1, 0.8, 0.04);
  auto [a2, h2] = hub_background(half, rng2, 0.8, 0.04);

  Adjacency a(p);
  for (std::size_t i = 0; i < half; ++i)
    for (std::size_t j = i + 1; j < half; ++j) {
      if (a1(i, j)) a.add_edge(i, j);
      if (a2(i, j)) a.add_edge(half + i, half + j);
    }
  Rng cross(derive_stream(seed, 0, kPurposeCross));
  for (std::size_t i = 0; i < half; ++i)
    for (std::size_t j = 0; j < half; ++j)
      if (cross.bernoulli(0.01)) a.add_edge(i, half + j);

  HubSet h;
  h.method = HubSet::Method::planted;
  h.indices = h1.indices;
  for (std::size_t x : h2.indices) h.indices.push_back(half + x);
  return {std::move(a), std::move(h)};
}

std::pair<Adjacency, HubSet> gen_scale_free(std::size_t p, std::uint64_t seed) {
  if (p < 3) throw data_error("scale-free generation needs p >= 3");
  Rng rng(derive_stream(seed, 0, kPurposeWiring));
  Adjacency a(p);
  a.add_edge(0, 1);
  // endpoint list doubles as the degree-proportional sampler
  std::vector<std::size_t> endpoints{0, 1};
  for (std::size_t v = 2; v < p; ++v) {
    std::size_t target = endpoints[rng.below(endpoints.size())];
    a.add_edge(v, target);
    endpoints.push_back(v);
    endpoints.push_back(target);
  }
  HubSet h;
  h.method = HubSet::Method::planted;  // none planted; threshold rule applies post hoc
  return {std::move(a), std::move(h)};
}

SymMatrix adjacency_to_precision(const Adjacency& a, std::uint64_t seed) {
  const std::size_t p = a.dim();
  Rng rng(derive_stream(seed, 0, kPurposeOmega));
  SymMatrix omega(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (a(i, j)) {
        double mag = rng.uniform(0.5, 0.8);
        omega.set(i, j, rng.bernoulli(0.5) ? mag : -mag);
      }
  double lmin = eigen_extremes(omega).min;
  SymMatrix theta = omega;
  for (std::size_t i = 0; i < p; ++i) theta.set(i, i, 0.1 - lmin);
  return theta;
}

NetworkSpec generate_network(Mechanism m, std::size_t p, std::uint64_t seed) {
  NetworkSpec net;
  net.p = p;
  std::pair<Adjacency, HubSet> ah;
  switch (m) {
    case Mechanism::i: ah = gen_adjacency_i(p, seed); break;
    case Mechanism::ii: ah = gen_adjacency_ii(p, seed); break;
    case Mechanism::iii: ah = gen_adjacency_iii(p, seed); break;
    case Mechanism::scale_free: ah = gen_scale_free(p, seed); break;
  }
  net.adjacency = std::move(ah.first);
  net.hubs = std::move(ah.second);
  net.theta0 = adjacency_to_precision(net.adjacency, seed);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (net.theta0(i, j) != 0.0) net.support.emplace_back(i, j);
  return net;
}

DataMatrix sample_gaussian(const SymMatrix& theta0, std::size_t n, std::uint64_t seed) {
  const std::size_t p = theta0.dim();
  Cholesky ct(theta0);  // throws when theta0 is not PD
  SymMatrix sigma = ct.inverse();
  Cholesky cs(sigma);
  Rng rng(derive_stream(seed, 0, kPurposeGauss));
  Matrix x(n, p);
  std::vector<double> z(p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < p; ++k) z[k] = rng.normal();
    for (std::size_t i = 0; i < p; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= i; ++k) acc += cs.lower(i, k) * z[k];
      x(r, i) = acc;
    }
  }
  return DataMatrix(std::move(x));
}

void write_network_dir(const std::string& dir, const NetworkSpec& net, Mechanism m,
                       std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  Matrix adj(net.p, net.p);
  for (std::size_t i = 0; i < net.p; ++i)
    for (std::size_t j = 0; j < net.p; ++j) adj(i, j) = net.adjacency(i, j) ? 1.0 : 0.0;
  write_matrix_csv(dir + "/adjacency.csv", adj);
  write_sym_csv(dir + "/theta0.csv", net.theta0);
  write_json_atomic(dir + "/hubs.json", hubset_to_json(net.hubs));

  nlohmann::json meta;
  meta["mechanism"] = mechanism_to_string(m);
  meta["p"] = net.p;
  meta["seed"] = seed;
  meta["edges"] = net.adjacency.edge_count();
  write_json_atomic(dir + "/meta.json", meta);
}

NetworkSpec read_network_dir(const std::string& dir) {
  NetworkSpec net;
  Matrix adj = read_matrix_csv(dir + "/adjacency.csv");
  net.p = adj.rows();
  net.adjacency = Adjacency(net.p);
  for (std::size_t i = 0; i < net.p; ++i)
    for (std::size_t j = i + 1; j < net.p; ++j)
      if (adj(i, j) != 0.0) net.adjacency.add_edge(i, j);
  net.theta0 = read_sym_csv(dir + "/theta0.csv");
  net.hubs = hubset_from_json(read_json(dir + "/hubs.json"));
  for (std::size_t i = 0; i < net.p; ++i)
    for (std::size_t j = i + 1; j < net.p; ++j)
      if (net.theta0(i, j) != 0.0) net.support.emplace_back(i, j);
  return net;
}

}  // namespace hwg
