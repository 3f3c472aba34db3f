#include "hwg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace hwg {

ConfusionMetrics confusion_metrics(const SymMatrix& theta_hat, const SymMatrix& theta0) {
  if (theta_hat.dim() != theta0.dim())
    throw dimension_mismatch("confusion_metrics: dimension mismatch");
  const std::size_t p = theta_hat.dim();
  std::size_t tp = 0, pos = 0, tn = 0, neg = 0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) {
      bool hat = is_nonzero(theta_hat(i, j));
      bool truth = theta0(i, j) != 0.0;
      if (truth) {  // i <= j, diagonal included
        ++pos;
        if (hat) ++tp;
      }
      if (i < j && !truth) {
        ++neg;
        if (!hat) ++tn;
      }
    }
  ConfusionMetrics m;
  m.tpr_undefined = pos == 0;
  m.tnr_undefined = neg == 0;
  m.tpr = pos ? static_cast<double>(tp) / static_cast<double>(pos) : 1.0;
  m.tnr = neg ? static_cast<double>(tn) / static_cast<double>(neg) : 1.0;
  m.edge_count = edge_count(theta_hat);
  return m;
}

HubMetrics hub_metrics(const SymMatrix& theta_hat, const SymMatrix& theta0,
                       const HubSet& true_hubs, double k_percent) {
  if (theta_hat.dim() != theta0.dim())
    throw dimension_mismatch("hub_metrics: dimension mismatch");
  const std::size_t p = theta_hat.dim();
  HubMetrics m;

  // hub edges: ordered pairs (i, j), i in H, j != i
  std::size_t hit = 0, total = 0;
  for (std::size_t i : true_hubs.indices)
    for (std::size_t j = 0; j < p; ++j) {
      if (j == i) continue;
      if (theta0(i, j) != 0.0) {
        ++total;
        if (is_nonzero(theta_hat(i, j))) ++hit;
      }
    }
  m.hub_edge_pct = total ? 100.0 * static_cast<double>(hit) / static_cast<double>(total)
                         : 0.0;

  HubSet est = identify_hubs_threshold(theta_hat, k_percent);
  std::size_t inter = 0;
  for (std::size_t h : est.indices)
    if (true_hubs.contains(h)) ++inter;
  std::size_t nonhub_true = p - true_hubs.indices.size();
  std::size_t nonhub_est_correct = 0;
  for (std::size_t i = 0; i < p; ++i)
    if (!est.contains(i) && !true_hubs.contains(i)) ++nonhub_est_correct;

  m.hub_undefined = true_hubs.indices.empty() || total == 0;
  m.hub_node_pct = true_hubs.indices.empty()
                       ? 0.0
                       : 100.0 * static_cast<double>(inter) /
                             static_cast<double>(true_hubs.indices.size());
  m.nonhub_node_pct = nonhub_true ? 100.0 * static_cast<double>(nonhub_est_correct) /
                                        static_cast<double>(nonhub_true)
                                  : 100.0;
  return m;
}

double frobenius_measure(const SymMatrix& theta_hat, const SymMatrix& theta0) {
  if (theta_hat.dim() != theta0.dim())
    throw dimension_mismatch("frobenius_measure: dimension mismatch");
  const std::size_t p = theta_hat.dim();
  double acc = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double d = theta_hat(i, j) - theta0(i, j);
      acc += 2.0 * d * d;
    }
  return acc / static_cast<double>(p);
}

MetricsReport evaluate_fit(const SymMatrix& theta_hat, const NetworkSpec& truth,
                           double k_percent) {
  ConfusionMetrics c = confusion_metrics(theta_hat, truth.theta0);
  HubMetrics h = hub_metrics(theta_hat, truth.theta0, truth.hubs, k_percent);
  MetricsReport r;
  r.tpr = c.tpr;
  r.tnr = c.tnr;
  r.edge_count = static_cast<double>(c.edge_count);
  r.hub_edge_pct = h.hub_edge_pct;
  r.hub_node_pct = h.hub_node_pct;
  r.nonhub_node_pct = h.nonhub_node_pct;
  r.frobenius = frobenius_measure(theta_hat, truth.theta0);
  double full = 0.0;
  for (std::size_t i = 0; i < theta_hat.dim(); ++i) {
    double d = theta_hat(i, i) - truth.theta0(i, i);
    full += d * d;
  }
  r.frobenius_full = r.frobenius + full / static_cast<double>(theta_hat.dim());
  return r;
}

Adjacency estimate_graph(const SymMatrix& theta) {
  Adjacency a(theta.dim());
  for (std::size_t i = 0; i < theta.dim(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (is_nonzero(theta(i, j))) a.add_edge(i, j);
  return a;
}

GraphStats graph_stats(const Adjacency& a) {
  const std::size_t p = a.dim();
  GraphStats g;
  if (p == 0) return g;

  std::vector<std::vector<std::size_t>> nbr(p);
  std::size_t edges = 0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (a(i, j)) {
        nbr[i].push_back(j);
        nbr[j].push_back(i);
        ++edges;
      }

  g.density = (p > 1) ? 2.0 * static_cast<double>(edges) /
                            (static_cast<double>(p) * static_cast<double>(p - 1))
                      : 0.0;
  g.degree_centrality.resize(p);
  for (std::size_t i = 0; i < p; ++i)
    g.degree_centrality[i] =
        (p > 1) ? static_cast<double>(nbr[i].size()) / static_cast<double>(p - 1) : 0.0;

  // global clustering: 3 * triangles / connected triples
  std::size_t triangles3 = 0;  // counts each triangle three times
  double triples = 0.0;
  for (std::size_t v = 0; v < p; ++v) {
    double d = static_cast<double>(nbr[v].size());
    triples += d * (d - 1.0) / 2.0;
    for (std::size_t x : nbr[v])
      for (std::size_t y : nbr[v])
        if (x < y && a(x, y)) ++triangles3;
  }
  g.global_clustering = triples > 0.0 ? static_cast<double>(triangles3) / triples : 0.0;

  // Brandes accumulation for unweighted betweenness plus path-length sums
  g.betweenness.assign(p, 0.0);
  double path_sum = 0.0;
  std::size_t connected_pairs = 0;
  std::vector<long> dist(p);
  std::vector<double> nsp(p), delta(p);
  std::vector<std::vector<std::size_t>> pred(p);
  std::vector<std::size_t> order;
  order.reserve(p);
  for (std::size_t s = 0; s < p; ++s) {
    std::fill(dist.begin(), dist.end(), -1L);
    std::fill(nsp.begin(), nsp.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& v : pred) v.clear();
    order.clear();
    std::deque<std::size_t> queue;
    dist[s] = 0;
    nsp[s] = 1.0;
    queue.push_back(s);
    while (!queue.empty()) {
      std::size_t v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (std::size_t w : nbr[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          nsp[w] += nsp[v];
          pred[w].push_back(v);
        }
      }
    }
    for (std::size_t t = 0; t < p; ++t)
      if (t != s && dist[t] > 0) {
        path_sum += static_cast<double>(dist[t]);
        ++connected_pairs;
      }
    for (std::size_t k = order.size(); k-- > 0;) {
      std::size_t w = order[k];
      for (std::size_t v : pred[w])
        delta[v] += nsp[v] / nsp[w] * (1.0 + delta[w]);
      if (w != s) g.betweenness[w] += delta[w];
    }
  }
  // each unordered pair was accumulated from both endpoints
  double norm = (p > 2) ? static_cast<double>(p - 1) * static_cast<double>(p - 2) / 2.0
                        : 1.0;
  for (double& b : g.betweenness) b = b / 2.0 / norm;

  std::size_t total_ordered = p * (p - 1);
  g.apl_defined = connected_pairs > 0;
  g.has_disconnected_pairs = connected_pairs < total_ordered;
  g.avg_path_length =
      g.apl_defined ? path_sum / static_cast<double>(connected_pairs) : 0.0;
  return g;
}

}  // namespace hwg
