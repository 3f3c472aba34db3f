#include "hwg/compositional.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <thread>

#include "hwg/rng.hpp"

namespace hwg {

namespace {
constexpr std::uint64_t kPurposeBootstrap = 11;
constexpr std::uint64_t kPurposePermute = 12;
}  // namespace

AbundanceTable::AbundanceTable(Matrix v, std::vector<std::string> taxa_names,
                               std::vector<std::string> ids)
    : values(std::move(v)), taxa(std::move(taxa_names)), sample_ids(std::move(ids)) {
  if (values.cols() < 2) throw data_error("abundance table needs at least 2 taxa");
  if (!taxa.empty() && taxa.size() != values.cols())
    throw data_error("taxa label count does not match column count");
  std::set<std::string> uniq(taxa.begin(), taxa.end());
  if (!taxa.empty() && uniq.size() != taxa.size())
    throw data_error("taxa labels must be unique");
  if (!sample_ids.empty() && sample_ids.size() != values.rows())
    throw data_error("sample id count does not match row count");
  for (std::size_t i = 0; i < values.rows(); ++i)
    for (std::size_t j = 0; j < values.cols(); ++j) {
      double x = values(i, j);
      if (!std::isfinite(x) || x < 0.0)
        throw data_error("abundances must be finite and nonnegative");
    }
}

AbundanceTable read_abundance_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");
  std::string line;
  std::vector<std::string> taxa;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        cells.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    cells.push_back(cur);
    if (!have_header) {
      have_header = true;
      taxa.assign(cells.begin() + 1, cells.end());
      continue;
    }
    if (cells.size() != taxa.size() + 1)
      throw data_error(path + ": ragged abundance row");
    ids.push_back(cells[0]);
    std::vector<double> row(taxa.size());
    for (std::size_t j = 0; j < taxa.size(); ++j) {
      char* end = nullptr;
      row[j] = std::strtod(cells[j + 1].c_str(), &end);
      if (end == cells[j + 1].c_str())
        throw data_error(path + ": cannot parse abundance '" + cells[j + 1] + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw data_error(path + ": no abundance rows");
  Matrix m(rows.size(), taxa.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < taxa.size(); ++j) m(i, j) = rows[i][j];
  return AbundanceTable(std::move(m), std::move(taxa), std::move(ids));
}

Matrix clr_transform_rows(const Matrix& raw, double zero_replacement) {
  const std::size_t n = raw.rows(), p = raw.cols();
  Matrix out(n, p);
  std::vector<double> w(p);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < p; ++j) total += raw(i, j);
    if (total <= 0.0)
      throw data_error("sample " + std::to_string(i + 1) + " is entirely zero");
    double sum = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      w[j] = raw(i, j) == 0.0 ? zero_replacement : raw(i, j);
      sum += w[j];
    }
    double mean_log = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      w[j] = std::log(w[j] / sum);
      mean_log += w[j];
    }
    mean_log /= static_cast<double>(p);
    for (std::size_t j = 0; j < p; ++j) out(i, j) = w[j] - mean_log;
  }
  return out;
}

DataMatrix clr_transform(const AbundanceTable& table, double zero_replacement) {
  if (!(zero_replacement > 0.0)) throw data_error("zero replacement must be positive");
  return DataMatrix(clr_transform_rows(table.values, zero_replacement), table.taxa);
}

RecipeFit run_recipe(const DataMatrix& data, const FitRecipe& recipe) {
  SymMatrix s = sample_covariance(data, recipe.center);
  RecipeFit out;
  SymMatrix theta_tilde =
      initial_estimate(s, data.n(), recipe.init, recipe.solver, &out.alpha);
  WeightMatrix w = hub_lasso_weights(theta_tilde, recipe.gamma1, recipe.gamma2);
  if (recipe.fixed_lambda > 0.0) {
    out.fit = fit_weighted_glasso(s, w.scaled(recipe.fixed_lambda), recipe.solver);
    out.lambda = recipe.fixed_lambda;
    return out;
  }
  Grid grid = default_lambda_grid(s, w, recipe.grid_size, recipe.grid_min_ratio);
  auto [fit, report] = select_lambda(s, w, grid, data.n(), recipe.solver);
  out.fit = std::move(fit);
  out.lambda = report.points[report.chosen].lambda1;
  return out;
}

namespace {

// Runs body(r) for r in [0, count) across jobs threads; per-index outputs
// keep results independent of scheduling.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
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

DataMatrix resample_rows(const DataMatrix& data, Rng& rng) {
  const std::size_t n = data.n(), p = data.p();
  Matrix m(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t src = static_cast<std::size_t>(rng.below(n));
    for (std::size_t j = 0; j < p; ++j) m(i, j) = data.values(src, j);
  }
  return DataMatrix(std::move(m), data.labels);
}

}  // namespace

StabilityResult bootstrap_stability(const DataMatrix& data, const FitRecipe& recipe,
                                    std::size_t B, double threshold,
                                    std::uint64_t seed, int jobs) {
  if (data.n() < 2) throw data_error("bootstrap needs at least 2 rows");
  if (B == 0) throw data_error("bootstrap needs B >= 1");
  const std::size_t p = data.p();

  std::vector<char> ok(B, 0);
  std::vector<std::vector<char>> patterns(B);
  parallel_for(B, jobs, [&](std::size_t b) {
    Rng rng(derive_stream(seed, b, kPurposeBootstrap));
    try {
      DataMatrix boot = resample_rows(data, rng);
      RecipeFit rf = run_recipe(boot, recipe);
      if (!rf.fit.converged) return;
      std::vector<char> pat(p * p, 0);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < i; ++j)
          if (is_nonzero(rf.fit.theta(i, j))) pat[i * p + j] = 1;
      patterns[b] = std::move(pat);
      ok[b] = 1;
    } catch (const error&) {
      // counted below
    }
  });

  StabilityResult out;
  out.replicates = B;
  out.threshold = threshold;
  std::size_t successes = 0;
  std::vector<std::size_t> counts(p * p, 0);
  for (std::size_t b = 0; b < B; ++b) {
    if (!ok[b]) continue;
    ++successes;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < i; ++j)
        counts[i * p + j] += patterns[b][i * p + j];
  }
  out.failures = B - successes;
  if (out.failures * 5 > B)
    throw convergence_error("more than 20% of bootstrap refits failed");

  out.proportion = SymMatrix(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double prop = static_cast<double>(counts[i * p + j]) /
                    static_cast<double>(successes);
      out.proportion.set(i, j, prop);
      if (prop >= threshold) out.stable_edges.emplace_back(j, i);
    }
  return out;
}

namespace {

struct NetSummary {
  GraphStats stats;
};

NetSummary summarize(const FitResult& fit) {
  NetSummary s;
  s.stats = graph_stats(estimate_graph(fit.theta));
  return s;
}

struct StatDiffs {
  double density = 0.0, clustering = 0.0, apl = 0.0;
  bool apl_ok = false;
  std::vector<double> degree, betweenness;
};

StatDiffs diff_stats(const NetSummary& a, const NetSummary& b) {
  StatDiffs d;
  d.density = a.stats.density - b.stats.density;
  d.clustering = a.stats.global_clustering - b.stats.global_clustering;
  d.apl_ok = a.stats.apl_defined && b.stats.apl_defined;
  d.apl = d.apl_ok ? a.stats.avg_path_length - b.stats.avg_path_length : 0.0;
  const std::size_t p = a.stats.degree_centrality.size();
  d.degree.resize(p);
  d.betweenness.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    d.degree[i] = a.stats.degree_centrality[i] - b.stats.degree_centrality[i];
    d.betweenness[i] = a.stats.betweenness[i] - b.stats.betweenness[i];
  }
  return d;
}

}  // namespace

PermTestResult permutation_test(const DataMatrix& group_a, const DataMatrix& group_b,
                                std::size_t R, std::uint64_t seed,
                                const FitRecipe& recipe, bool reselect_per_permutation,
                                int jobs) {
  if (group_a.p() != group_b.p())
    throw dimension_mismatch("permutation test needs matching columns");
  if (!group_a.labels.empty() && !group_b.labels.empty() &&
      group_a.labels != group_b.labels)
    throw data_error("permutation test groups have different taxa labels");
  if (R == 0) throw data_error("permutation test needs R >= 1");

  const std::size_t na = group_a.n(), nb = group_b.n(), p = group_a.p();
  RecipeFit fit_a = run_recipe(group_a, recipe);
  RecipeFit fit_b = run_recipe(group_b, recipe);
  StatDiffs obs = diff_stats(summarize(fit_a.fit), summarize(fit_b.fit));

  // pooled rows; each permutation deals the first na to group A
  Matrix pooled(na + nb, p);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < p; ++j) pooled(i, j) = group_a.values(i, j);
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = 0; j < p; ++j) pooled(na + i, j) = group_b.values(i, j);

  FitRecipe perm_recipe_a = recipe, perm_recipe_b = recipe;
  if (!reselect_per_permutation) {
    perm_recipe_a.fixed_lambda = fit_a.lambda;
    perm_recipe_b.fixed_lambda = fit_b.lambda;
  }

  std::vector<char> ok(R, 0);
  std::vector<StatDiffs> diffs(R);
  parallel_for(R, jobs, [&](std::size_t r) {
    Rng rng(derive_stream(seed, r, kPurposePermute));
    std::vector<std::size_t> order(na + nb);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    Matrix ma(na, p), mb(nb, p);
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t j = 0; j < p; ++j) ma(i, j) = pooled(order[i], j);
    for (std::size_t i = 0; i < nb; ++i)
      for (std::size_t j = 0; j < p; ++j) mb(i, j) = pooled(order[na + i], j);
    try {
      RecipeFit ra = run_recipe(DataMatrix(std::move(ma), group_a.labels), perm_recipe_a);
      RecipeFit rb = run_recipe(DataMatrix(std::move(mb), group_b.labels), perm_recipe_b);
      diffs[r] = diff_stats(summarize(ra.fit), summarize(rb.fit));
      ok[r] = 1;
    } catch (const error&) {
    }
  });

  std::size_t used = 0;
  std::size_t c_density = 0, c_clustering = 0, c_apl = 0;
  std::vector<std::size_t> c_degree(p, 0), c_betweenness(p, 0);
  for (std::size_t r = 0; r < R; ++r) {
    if (!ok[r]) continue;
    ++used;
    const StatDiffs& d = diffs[r];
    if (std::abs(d.density) >= std::abs(obs.density)) ++c_density;
    if (std::abs(d.clustering) >= std::abs(obs.clustering)) ++c_clustering;
    // an undefined permuted path length counts as extreme
    if (!d.apl_ok || std::abs(d.apl) >= std::abs(obs.apl)) ++c_apl;
    for (std::size_t i = 0; i < p; ++i) {
      if (std::abs(d.degree[i]) >= std::abs(obs.degree[i])) ++c_degree[i];
      if (std::abs(d.betweenness[i]) >= std::abs(obs.betweenness[i])) ++c_betweenness[i];
    }
  }
  if ((R - used) * 5 > R)
    throw convergence_error("more than 20% of permutation refits failed");

  auto pvalue = [&](std::size_t count) {
    return (1.0 + static_cast<double>(count)) / (static_cast<double>(used) + 1.0);
  };
  PermTestResult out;
  out.permutations = used;
  out.failures = R - used;
  out.obs_density = obs.density;
  out.obs_clustering = obs.clustering;
  out.obs_apl = obs.apl;
  out.apl_defined = obs.apl_ok;
  out.p_density = pvalue(c_density);
  out.p_clustering = pvalue(c_clustering);
  out.p_apl = obs.apl_ok ? pvalue(c_apl) : std::numeric_limits<double>::quiet_NaN();
  out.obs_degree_diff = obs.degree;
  out.obs_betweenness_diff = obs.betweenness;
  out.p_degree.resize(p);
  out.p_betweenness.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    out.p_degree[i] = pvalue(c_degree[i]);
    out.p_betweenness[i] = pvalue(c_betweenness[i]);
  }
  return out;
}

}  // namespace hwg
