#include "hwg/benchmark.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <functional>
#include <thread>

#include "hwg/rng.hpp"

namespace hwg {

namespace {
constexpr std::uint64_t kPurposeNetwork = 101;
constexpr std::uint64_t kPurposeData = 102;
}  // namespace

std::string method_to_string(Method m) {
  switch (m) {
    case Method::glasso: return "glasso";
    case Method::ada_glasso: return "ada_glasso";
    case Method::hw_glasso: return "hw_glasso";
    case Method::two_step: return "two_step";
    case Method::two_step_known: return "two_step_known_hubs";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "glasso") return Method::glasso;
  if (s == "ada_glasso" || s == "ada") return Method::ada_glasso;
  if (s == "hw_glasso" || s == "hw") return Method::hw_glasso;
  if (s == "two_step" || s == "two-step") return Method::two_step;
  if (s == "two_step_known_hubs" || s == "two-step-known") return Method::two_step_known;
  throw data_error("unknown method '" + s + "'");
}

std::uint64_t data_checksum(const DataMatrix& data) {
  // FNV-1a over the raw value bytes
  std::uint64_t h = 1469598103934665603ULL;
  const double* v = data.values.data();
  const std::size_t count = data.n() * data.p();
  for (std::size_t k = 0; k < count; ++k) {
    std::uint64_t bits;
    std::memcpy(&bits, &v[k], sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffULL;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

namespace {

void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t r = 0; r < count; ++r) body(r);
    return;
  }
  std::size_t workers = std::min<std::size_t>(jobs, count);
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (std::size_t t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t r = next.fetch_add(1);
        if (r >= count) return;
        body(r);
      }
    });
  for (auto& th : pool) th.join();
}

bool needs_two_step(const ExperimentConfig& cfg) {
  for (Method m : cfg.methods)
    if (m == Method::two_step || m == Method::two_step_known) return true;
  return false;
}

bool needs_initializer(const ExperimentConfig& cfg) {
  for (Method m : cfg.methods)
    if (m != Method::glasso) return true;
  return false;
}

struct ReplicateOutput {
  std::vector<ReplicateRecord> records;
  bool failed = false;
};

ReplicateOutput run_replicate(const ExperimentConfig& cfg, std::size_t r) {
  ReplicateOutput out;
  NetworkSpec net = generate_network(cfg.mechanism, cfg.p,
                                     derive_stream(cfg.seed, r, kPurposeNetwork));
  if (net.hubs.indices.empty())  // no planting: hubs are defined by degree
    net.hubs = identify_hubs_threshold(net.theta0, cfg.k_percent);
  DataMatrix data =
      sample_gaussian(net.theta0, cfg.n, derive_stream(cfg.seed, r, kPurposeData));
  const std::uint64_t checksum = data_checksum(data);
  SymMatrix s = sample_covariance(data, false);  // mean-zero sampling model

  SymMatrix theta_tilde;
  if (needs_initializer(cfg)) theta_tilde = initial_estimate(s, cfg.n, cfg.init, cfg.solver);

  // the hub-weighted fit doubles as the two-step first stage
  FitResult hw_fit;
  double hw_lambda = 0.0;
  bool hw_done = false;
  auto ensure_hw = [&] {
    if (hw_done) return;
    WeightMatrix w = hub_lasso_weights(theta_tilde, cfg.gamma1, cfg.gamma2);
    Grid grid = default_lambda_grid(s, w, cfg.grid_size, cfg.grid_min_ratio);
    auto [fit, report] = select_lambda(s, w, grid, cfg.n, cfg.solver);
    hw_fit = std::move(fit);
    hw_lambda = report.points[report.chosen].lambda1;
    hw_done = true;
  };

  Grid pair_grid;
  if (needs_two_step(cfg)) {
    WeightMatrix uniform = WeightMatrix::uniform(cfg.p);
    pair_grid = default_lambda_grid(s, uniform, cfg.pair_grid_size, cfg.grid_min_ratio);
  }

  for (Method m : cfg.methods) {
    ReplicateRecord rec;
    rec.replicate = r;
    rec.method = m;
    rec.data_checksum = checksum;
    try {
      if (data_checksum(data) != checksum)
        throw error("replicate data changed between methods");
      FitResult fit;
      switch (m) {
        case Method::glasso: {
          WeightMatrix w = WeightMatrix::uniform(cfg.p);
          Grid grid = default_lambda_grid(s, w, cfg.grid_size, cfg.grid_min_ratio);
          auto [f, report] = select_lambda(s, w, grid, cfg.n, cfg.solver);
          fit = std::move(f);
          rec.lambda1 = report.points[report.chosen].lambda1;
          break;
        }
        case Method::ada_glasso: {
          WeightMatrix w = hub_lasso_weights(theta_tilde, cfg.gamma1, 0.0);
          Grid grid = default_lambda_grid(s, w, cfg.grid_size, cfg.grid_min_ratio);
          auto [f, report] = select_lambda(s, w, grid, cfg.n, cfg.solver);
          fit = std::move(f);
          rec.lambda1 = report.points[report.chosen].lambda1;
          break;
        }
        case Method::hw_glasso: {
          ensure_hw();
          fit = hw_fit;
          rec.lambda1 = hw_lambda;
          break;
        }
        case Method::two_step: {
          ensure_hw();
          TwoStepResult ts =
              fit_two_step(s, hw_fit, cfg.hub_rule, cfg.k_percent, pair_grid,
                           pair_grid, cfg.n, cfg.solver, nullptr,
                           derive_stream(cfg.seed, r, 103));
          fit = std::move(ts.fit);
          rec.lambda1 = ts.report.points[ts.report.chosen].lambda1;
          rec.lambda2 = ts.report.points[ts.report.chosen].lambda2;
          break;
        }
        case Method::two_step_known: {
          ensure_hw();
          TwoStepResult ts = fit_two_step(s, hw_fit, HubRule::known, cfg.k_percent,
                                          pair_grid, pair_grid, cfg.n, cfg.solver,
                                          &net.hubs);
          fit = std::move(ts.fit);
          rec.lambda1 = ts.report.points[ts.report.chosen].lambda1;
          rec.lambda2 = ts.report.points[ts.report.chosen].lambda2;
          break;
        }
      }
      rec.metrics = evaluate_fit(fit.theta, net, cfg.k_percent);
      rec.kkt = fit.kkt_violation;
      rec.ok = true;
    } catch (const error& e) {
      rec.error = e.what();
      out.failed = true;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

AggregateCell aggregate(const std::vector<double>& xs) {
  AggregateCell c;
  if (xs.empty()) return c;
  double sum = 0.0;
  for (double x : xs) sum += x;
  c.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - c.mean) * (x - c.mean);
    double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    c.se = sd / std::sqrt(static_cast<double>(xs.size()));
    c.se_defined = true;
  }
  return c;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.replicates < 1) throw data_error("experiment needs at least 1 replicate");
  std::vector<ReplicateOutput> outputs(cfg.replicates);
  parallel_for(cfg.replicates, cfg.jobs,
               [&](std::size_t r) { outputs[r] = run_replicate(cfg, r); });

  ExperimentResult result;
  for (auto& o : outputs) {
    if (o.failed) ++result.failed_replicates;
    for (auto& rec : o.records) {
      result.max_kkt = std::max(result.max_kkt, rec.kkt);
      result.log.push_back(std::move(rec));
    }
  }
  if (result.failed_replicates * 10 > cfg.replicates) {
    std::string detail;
    for (const auto& rec : result.log)
      if (!rec.ok && !rec.error.empty()) {
        detail = rec.error;
        break;
      }
    throw convergence_error("more than 10% of replicates failed (first error: " +
                            detail + ")");
  }

  for (Method m : cfg.methods) {
    std::vector<double> tpr, tnr, he, hn, nh, ec, fr, ff;
    for (const auto& rec : result.log) {
      if (rec.method != m || !rec.ok) continue;
      tpr.push_back(rec.metrics.tpr);
      tnr.push_back(rec.metrics.tnr);
      he.push_back(rec.metrics.hub_edge_pct);
      hn.push_back(rec.metrics.hub_node_pct);
      nh.push_back(rec.metrics.nonhub_node_pct);
      ec.push_back(rec.metrics.edge_count);
      fr.push_back(rec.metrics.frobenius);
      ff.push_back(rec.metrics.frobenius_full);
    }
    AggregateRow row;
    row.method = m;
    row.replicates_used = tpr.size();
    row.tpr = aggregate(tpr);
    row.tnr = aggregate(tnr);
    row.hub_edge_pct = aggregate(he);
    row.hub_node_pct = aggregate(hn);
    row.nonhub_node_pct = aggregate(nh);
    row.edges = aggregate(ec);
    row.frobenius = aggregate(fr);
    row.frobenius_full = aggregate(ff);
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::vector<RatePoint> rate_experiment(Mechanism mechanism, std::size_t p,
                                       const std::vector<std::size_t>& n_list,
                                       std::size_t replicates, std::uint64_t seed,
                                       const ExperimentConfig& base) {
  if (n_list.empty()) throw data_error("rate experiment needs at least one n");
  for (std::size_t k = 1; k < n_list.size(); ++k)
    if (n_list[k] <= n_list[k - 1])
      throw data_error("rate experiment needs strictly ascending sample sizes");

  std::vector<RatePoint> out;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const std::size_t n = n_list[ni];
    std::vector<double> frob(replicates, 0.0), zfrac(replicates, 0.0);
    std::vector<char> ok(replicates, 0);
    parallel_for(replicates, base.jobs, [&](std::size_t r) {
      try {
        // the same network per replicate across the n sweep (paired trend)
        NetworkSpec net =
            generate_network(mechanism, p, derive_stream(seed, r, kPurposeNetwork));
        DataMatrix data = sample_gaussian(
            net.theta0, n, derive_stream(seed, r, 1000 + ni));
        SymMatrix s = sample_covariance(data, false);
        SymMatrix theta_tilde = initial_estimate(s, n, base.init, base.solver);
        WeightMatrix w = hub_lasso_weights(theta_tilde, base.gamma1, base.gamma2);
        Grid grid = default_lambda_grid(s, w, base.grid_size, base.grid_min_ratio);
        auto [fit, report] = select_lambda(s, w, grid, n, base.solver);
        frob[r] = std::sqrt(matrix_norms(fit.theta, net.theta0).frobenius_sq);
        std::size_t zeros = 0, total = 0;
        for (std::size_t i = 0; i < p; ++i)
          for (std::size_t j = 0; j < i; ++j)
            if (net.theta0(i, j) == 0.0) {
              ++total;
              if (!is_nonzero(fit.theta(i, j))) ++zeros;
            }
        zfrac[r] = total ? static_cast<double>(zeros) / static_cast<double>(total) : 1.0;
        ok[r] = 1;
      } catch (const error&) {
      }
    });
    RatePoint pt;
    pt.n = n;
    for (std::size_t r = 0; r < replicates; ++r) {
      if (!ok[r]) continue;
      pt.mean_frobenius_error += frob[r];
      pt.mean_zero_fraction += zfrac[r];
      ++pt.replicates_used;
    }
    if (pt.replicates_used == 0) throw convergence_error("all rate replicates failed");
    pt.mean_frobenius_error /= static_cast<double>(pt.replicates_used);
    pt.mean_zero_fraction /= static_cast<double>(pt.replicates_used);
    out.push_back(pt);
  }
  return out;
}

}  // namespace hwg
