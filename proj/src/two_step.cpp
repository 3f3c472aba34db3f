#include "hwg/two_step.hpp"

#include <algorithm>
#include <cmath>

#include "hwg/rng.hpp"

namespace hwg {

bool HubSet::contains(std::size_t i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

std::vector<std::size_t> degrees(const SymMatrix& theta) {
  const std::size_t p = theta.dim();
  std::vector<std::size_t> deg(p, 0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (is_nonzero(theta(i, j))) {
        ++deg[i];
        ++deg[j];
      }
  return deg;
}

HubSet identify_hubs_threshold(const SymMatrix& theta, double k_percent) {
  if (!(k_percent > 0.0 && k_percent < 100.0))
    throw data_error("hub threshold must be in (0, 100)");
  const std::size_t p = theta.dim();
  auto deg = degrees(theta);
  double cutoff = (k_percent / 100.0) * static_cast<double>(p - 1);
  HubSet h;
  h.method = HubSet::Method::threshold;
  for (std::size_t i = 0; i < p; ++i)
    if (static_cast<double>(deg[i]) > cutoff) h.indices.push_back(i);
  return h;
}

namespace {

struct TwoMeans {
  std::vector<int> assign;  // 0 = low cluster, 1 = high cluster
  double mean_low = 0.0, mean_high = 0.0;
  bool degenerate = true;
};

// exact 1-D 2-means: optimal clusters are intervals of the sorted values,
// so scanning the distinct-value split points finds the global optimum
TwoMeans two_means_exact(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> sorted(x);
  std::sort(sorted.begin(), sorted.end());
  TwoMeans out;
  out.assign.assign(n, 0);
  if (sorted.front() == sorted.back()) return out;  // all equal

  std::vector<double> pre(n + 1, 0.0), pre2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    pre[i + 1] = pre[i] + sorted[i];
    pre2[i + 1] = pre2[i] + sorted[i] * sorted[i];
  }
  auto wcss = [&](std::size_t a, std::size_t b) {  // [a, b)
    double cnt = static_cast<double>(b - a);
    double s = pre[b] - pre[a];
    return (pre2[b] - pre2[a]) - s * s / cnt;
  };
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (sorted[k - 1] == sorted[k]) continue;
    double w = wcss(0, k) + wcss(k, n);
    if (w < best) {
      best = w;
      best_k = k;
    }
  }
  double cut = sorted[best_k];
  double lo_mean = pre[best_k] / static_cast<double>(best_k);
  double hi_mean = (pre[n] - pre[best_k]) / static_cast<double>(n - best_k);
  if (std::abs(hi_mean - lo_mean) <= 1e-9) return out;
  out.degenerate = false;
  out.mean_low = lo_mean;
  out.mean_high = hi_mean;
  for (std::size_t i = 0; i < n; ++i) out.assign[i] = (x[i] >= cut) ? 1 : 0;
  return out;
}

TwoMeans two_means_lloyd(const std::vector<double>& x, std::uint64_t seed,
                         int restarts) {
  const std::size_t n = x.size();
  TwoMeans out;
  out.assign.assign(n, 0);
  double lo = *std::min_element(x.begin(), x.end());
  double hi = *std::max_element(x.begin(), x.end());
  if (lo == hi) return out;

  Rng rng(derive_stream(seed, 0, 0x6b6d65616e73ULL));
  double best_wcss = std::numeric_limits<double>::infinity();
  std::vector<int> best_assign;
  double best_c0 = 0.0, best_c1 = 0.0;
  for (int r = 0; r < restarts; ++r) {
    double c0 = x[rng.below(n)];
    double c1 = x[rng.below(n)];
    int guard = 0;
    while (c1 == c0 && guard++ < 64) c1 = x[rng.below(n)];
    if (c0 == c1) {
      c0 = lo;
      c1 = hi;
    }
    std::vector<int> assign(n, 0);
    for (int it = 0; it < 100; ++it) {
      bool moved = false;
      double s0 = 0, s1 = 0;
      std::size_t n0 = 0, n1 = 0;
      for (std::size_t i = 0; i < n; ++i) {
        int a = (std::abs(x[i] - c1) < std::abs(x[i] - c0)) ? 1 : 0;
        if (a != assign[i]) {
          assign[i] = a;
          moved = true;
        }
        if (a) {
          s1 += x[i];
          ++n1;
        } else {
          s0 += x[i];
          ++n0;
        }
      }
      if (n0 == 0 || n1 == 0) break;
      c0 = s0 / static_cast<double>(n0);
      c1 = s1 / static_cast<double>(n1);
      if (!moved) break;
    }
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double c = assign[i] ? c1 : c0;
      wcss += (x[i] - c) * (x[i] - c);
    }
    if (wcss < best_wcss) {
      best_wcss = wcss;
      best_assign = assign;
      best_c0 = c0;
      best_c1 = c1;
    }
  }
  if (best_assign.empty() || std::abs(best_c1 - best_c0) <= 1e-9) return out;
  out.degenerate = false;
  if (best_c1 >= best_c0) {
    out.assign = best_assign;
    out.mean_low = best_c0;
    out.mean_high = best_c1;
  } else {
    for (std::size_t i = 0; i < n; ++i) out.assign[i] = 1 - best_assign[i];
    out.mean_low = best_c1;
    out.mean_high = best_c0;
  }
  return out;
}

}  // namespace

HubSet identify_hubs_kmeans(const SymMatrix& theta, std::uint64_t seed) {
  const std::size_t p = theta.dim();
  if (p < 2) throw data_error("k-means hub identification needs p >= 2");
  auto deg = degrees(theta);
  std::vector<double> x(p);
  for (std::size_t i = 0; i < p; ++i) x[i] = static_cast<double>(deg[i]);
  TwoMeans tm = (p <= 25) ? two_means_exact(x) : two_means_lloyd(x, seed, 10);
  HubSet h;
  h.method = HubSet::Method::kmeans;
  if (tm.degenerate) return h;  // no separation: fall back to no hubs
  for (std::size_t i = 0; i < p; ++i)
    if (tm.assign[i] == 1) h.indices.push_back(i);
  return h;
}

PenaltyMatrix two_step_penalty(const HubSet& hubs, std::size_t p, double lambda1,
                               double lambda2, TwoStepWeightMode mode,
                               const SymMatrix* theta_tilde, double gamma1) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
    throw data_error("two-level penalties must be positive");
  if (mode == TwoStepWeightMode::adaptive && !theta_tilde)
    throw data_error("adaptive two-level weights need an initial estimate");
  if (theta_tilde && theta_tilde->dim() != p)
    throw dimension_mismatch("initial estimate dimension mismatch");
  std::vector<char> is_hub(p, 0);
  for (std::size_t h : hubs.indices) {
    if (h >= p) throw data_error("hub index out of range");
    is_hub[h] = 1;
  }
  PenaltyMatrix rho(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double base = (is_hub[i] || is_hub[j]) ? lambda1 : lambda2;
      if (mode == TwoStepWeightMode::adaptive) {
        double t = std::abs((*theta_tilde)(i, j));
        rho.set(i, j, t == 0.0 ? PenaltyMatrix::inf() : base / std::pow(t, gamma1));
      } else {
        rho.set(i, j, base);
      }
    }
  return rho;
}

TwoStepResult fit_two_step(const SymMatrix& s, const FitResult& first_fit,
                           HubRule rule, double k_percent, const Grid& grid1,
                           const Grid& grid2, std::size_t n, const SolverConfig& cfg,
                           const HubSet* known_hubs, std::uint64_t seed,
                           TwoStepWeightMode mode, const SymMatrix* theta_tilde,
                           double gamma1) {
  if (!first_fit.converged)
    throw data_error("two-step stage needs a converged first-stage fit");
  HubSet hubs;
  switch (rule) {
    case HubRule::known:
      if (!known_hubs) throw data_error("known-hub rule needs a hub set");
      hubs = *known_hubs;
      hubs.method = HubSet::Method::known;
      std::sort(hubs.indices.begin(), hubs.indices.end());
      break;
    case HubRule::threshold:
      hubs = identify_hubs_threshold(first_fit.theta, k_percent);
      break;
    case HubRule::kmeans:
      hubs = identify_hubs_kmeans(first_fit.theta, seed);
      break;
  }
  PairPenaltyMode pair_mode;
  pair_mode.adaptive = mode == TwoStepWeightMode::adaptive;
  pair_mode.gamma1 = gamma1;
  pair_mode.theta_tilde = theta_tilde;
  auto [fit, report] = select_lambda_pair(s, hubs.indices, grid1, grid2, n, cfg, pair_mode);
  return {std::move(fit), std::move(hubs), std::move(report)};
}

}  // namespace hwg
