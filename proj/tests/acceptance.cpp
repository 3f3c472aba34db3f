// Acceptance suite: exercises every release gate end to end and prints one
// PASS/FAIL line per gate.  Exits nonzero if any gate fails.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "hwg/benchmark.hpp"
#include "hwg/compositional.hpp"
#include "hwg/io.hpp"
#include "hwg/rng.hpp"
#include "oracles.hpp"

using namespace hwg;

namespace {

int g_failures = 0;
double g_max_kkt = 0.0;  // every fit made here feeds the KKT gate

void note_kkt(double k) { g_max_kkt = std::max(g_max_kkt, k); }

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s  %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------- gate 1

void criterion_oracle_equivalence() {
  double t0 = now_s();
  Rng rng(101);
  double worst_gap = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    std::size_t p = 2 + rep % 3;
    SymMatrix s = oracle::random_spd(p, rng);
    PenaltyMatrix rho(p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < i; ++j) rho.set(i, j, 0.02 + 0.15 * rng.uniform01());
    SolverConfig cfg;
    cfg.outer_tol = 1e-9;
    cfg.inner_tol = 1e-10;
    cfg.kkt_target = 1e-9;
    FitResult fit = fit_weighted_glasso(s, rho, cfg);
    note_kkt(fit.kkt_violation);
    auto sub = oracle::subgradient_glasso(s, rho, 1000000);
    worst_gap = std::max(worst_gap, std::abs(fit.objective - sub.objective));
  }
  double dt = now_s() - t0;
  report("criterion 1 (oracle equivalence)", worst_gap <= 1e-6 && dt < 120.0,
         fmt("worst objective gap %.2e over 50 instances, %.0fs (budget 120s)",
             worst_gap, dt));
}

// ---------------------------------------------------------------- gate 3

void criterion_zero_penalty() {
  SymMatrix theta0 = SymMatrix::identity(10);
  for (std::size_t i = 1; i < 10; ++i) theta0.set(i - 1, i, 0.2);
  DataMatrix data = sample_gaussian(theta0, 1000, 303);
  SymMatrix s = sample_covariance(data, false);
  SolverConfig cfg;
  cfg.outer_tol = 1e-9;
  cfg.inner_tol = 1e-10;
  cfg.kkt_target = 1e-8;
  FitResult fit = fit_weighted_glasso(s, PenaltyMatrix(10), cfg);
  note_kkt(fit.kkt_violation);
  SymMatrix target = chol_logdet_inverse(s).inverse;
  double rel = std::sqrt(matrix_norms(fit.theta, target).frobenius_sq /
                         matrix_norms(target, SymMatrix(10)).frobenius_sq);
  report("criterion 3 (zero-penalty recovery)", rel <= 1e-6,
         fmt("relative Frobenius error %.2e (<= 1e-6), p=10 n=1000", rel));
}

// ---------------------------------------------------------------- gate 6

std::string serialize_theta(const SymMatrix& t) {
  std::string s;
  for (std::size_t i = 0; i < t.dim(); ++i)
    for (std::size_t j = 0; j < t.dim(); ++j) {
      s += format_double(t(i, j));
      s += ',';
    }
  return s;
}

void criterion_ada_collapse() {
  Rng rng(606);
  bool all_identical = true;
  for (int rep = 0; rep < 10; ++rep) {
    std::size_t p = 6 + rep % 5;
    SymMatrix s = oracle::random_spd(p, rng);
    SymMatrix tilde = initial_estimate(s, 50, InitialEstimator::ridge(0.3));
    WeightMatrix ada = adaptive_lasso_weights(tilde, 1.0);
    WeightMatrix hw0 = hub_lasso_weights(tilde, 1.0, 0.0);
    Grid ga = default_lambda_grid(s, ada);
    Grid gh = default_lambda_grid(s, hw0);
    auto [fa, ra] = select_lambda(s, ada, ga, 60);
    auto [fh, rh] = select_lambda(s, hw0, gh, 60);
    note_kkt(fa.kkt_violation);
    note_kkt(fh.kkt_violation);
    if (serialize_theta(fa.theta) != serialize_theta(fh.theta) ||
        ra.chosen != rh.chosen || ga.values != gh.values)
      all_identical = false;
  }
  report("criterion 6 (ada-glasso collapse)", all_identical,
         "10 instances, gamma2=0 pipelines byte-identical to the adaptive path");
}

// ---------------------------------------------------------------- gate 8

void criterion_generators() {
  std::size_t checked = 0, bad_eigen = 0, bad_support = 0;
  auto check_net = [&](Mechanism m, std::size_t p, std::uint64_t seed) {
    NetworkSpec net = generate_network(m, p, seed);
    ++checked;
    if (std::abs(eigen_extremes(net.theta0).min - 0.1) > 1e-8) ++bad_eigen;
    bool miss = false;
    for (std::size_t i = 0; i < p && !miss; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if ((net.theta0(i, j) != 0.0) != net.adjacency(i, j)) {
          miss = true;
          break;
        }
    if (miss) ++bad_support;
  };
  for (std::uint64_t s = 0; s < 400; ++s) check_net(Mechanism::i, 50, s);
  for (std::uint64_t s = 0; s < 300; ++s) check_net(Mechanism::ii, 50, s);
  for (std::uint64_t s = 0; s < 150; ++s) check_net(Mechanism::iii, 100, s);
  for (std::uint64_t s = 0; s < 150; ++s) check_net(Mechanism::scale_free, 60, s);

  // mechanism (i) mean hub degree against 0.8(p-1)
  double sum = 0.0, sumsq = 0.0;
  std::size_t count = 0;
  for (std::uint64_t s = 0; s < 400; ++s) {
    auto [a, h] = gen_adjacency_i(50, s);
    auto deg = a.degree();
    for (std::size_t hub : h.indices) {
      double d = static_cast<double>(deg[hub]);
      sum += d;
      sumsq += d * d;
      ++count;
    }
  }
  double mean = sum / static_cast<double>(count);
  double sd = std::sqrt((sumsq - sum * sum / static_cast<double>(count)) /
                        static_cast<double>(count - 1));
  double se = sd / std::sqrt(static_cast<double>(count));
  bool hub_ok = std::abs(mean - 0.8 * 49.0) <= 3.0 * se;

  report("criterion 8 (generator invariants)",
         checked == 1000 && bad_eigen == 0 && bad_support == 0 && hub_ok,
         fmt("1000 networks: %zu eigen misses, %zu support misses; "
             "hub degree %.3f vs 39.2 (3se = %.3f)",
             bad_eigen, bad_support, mean, 3.0 * se));
}

// ---------------------------------------------------------------- gate 9

void criterion_clr() {
  Rng rng(909);
  std::size_t bad_sum = 0, bad_scale = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::size_t p = 3 + rng.below(10);
    Matrix raw(1, p);
    bool positive = rep % 2 == 0;
    for (std::size_t j = 0; j < p; ++j)
      raw(0, j) = positive ? rng.uniform(0.1, 100.0)
                           : (rng.bernoulli(0.3) ? 0.0 : rng.uniform(0.1, 100.0));
    raw(0, 0) = rng.uniform(0.1, 100.0);  // keep the sample nonzero
    Matrix clr = clr_transform_rows(raw, 0.5);
    double sum = 0.0;
    for (std::size_t j = 0; j < p; ++j) sum += clr(0, j);
    if (std::abs(sum) > 1e-10) ++bad_sum;
    if (positive) {  // compositional invariance on positive samples
      double c = rng.uniform(0.5, 50.0);
      Matrix scaled = raw;
      for (std::size_t j = 0; j < p; ++j) scaled(0, j) *= c;
      Matrix clr2 = clr_transform_rows(scaled, 0.5);
      for (std::size_t j = 0; j < p; ++j)
        if (std::abs(clr(0, j) - clr2(0, j)) > 1e-10) {
          ++bad_scale;
          break;
        }
    }
  }
  report("criterion 9 (clr invariants)", bad_sum == 0 && bad_scale == 0,
         fmt("1000 fuzzed samples: %zu row-sum misses, %zu scale misses",
             bad_sum, bad_scale));
}

// --------------------------------------------------------------- gate 11

void criterion_block_screening() {
  Rng rng(1111);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t p = 20;
    SymMatrix s(p);
    for (std::size_t i = 0; i < p; ++i) s.set(i, i, 1.0);
    std::size_t cut = 6 + rng.below(9);  // two blocks of varying size
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < i; ++j) {
        bool same = (i < cut) == (j < cut);
        s.set(i, j, same ? 0.35 * rng.uniform(-1.0, 1.0)
                         : 0.03 * rng.uniform(-1.0, 1.0));
      }
    double lmin = eigen_extremes(s).min;
    if (lmin < 0.05)
      for (std::size_t i = 0; i < p; ++i) s.set(i, i, s(i, i) + 0.05 - lmin);
    PenaltyMatrix rho(p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < i; ++j) rho.set(i, j, 0.04 + 0.02 * rng.uniform01());

    SolverConfig no_screen;
    no_screen.screen = false;
    no_screen.outer_tol = 1e-9;
    no_screen.inner_tol = 1e-10;
    no_screen.kkt_target = 1e-8;
    FitResult full = fit_weighted_glasso(s, rho, no_screen);
    note_kkt(full.kkt_violation);

    SymMatrix assembled(p);
    for (const auto& comp : block_screen(s, rho)) {
      if (comp.size() == 1) {
        assembled.set(comp[0], comp[0], 1.0 / s(comp[0], comp[0]));
        continue;
      }
      SymMatrix sub(comp.size());
      PenaltyMatrix sub_rho(comp.size());
      for (std::size_t a = 0; a < comp.size(); ++a)
        for (std::size_t b = 0; b <= a; ++b) {
          sub.set(a, b, s(comp[a], comp[b]));
          if (a != b) sub_rho.set(a, b, rho(comp[a], comp[b]));
        }
      FitResult sub_fit = fit_weighted_glasso(sub, sub_rho, no_screen);
      note_kkt(sub_fit.kkt_violation);
      for (std::size_t a = 0; a < comp.size(); ++a)
        for (std::size_t b = 0; b <= a; ++b)
          assembled.set(comp[a], comp[b], sub_fit.theta(a, b));
    }
    worst = std::max(worst,
                     std::sqrt(matrix_norms(full.theta, assembled).frobenius_sq));
  }
  report("criterion 11 (block screening exactness)", worst <= 1e-6,
         fmt("20 instances, worst Frobenius gap %.2e (<= 1e-6)", worst));
}

// ---------------------------------------------------------------- gate 7

void criterion_rate_trends() {
  ExperimentConfig base;
  base.jobs = 2;
  // the consistency/sparsistency statements assume weights built from the
  // (consistent) lasso initial estimator
  base.init = InitialEstimator::glasso_init();
  auto pts = rate_experiment(Mechanism::ii, 30, {100, 400, 1600}, 50, 707, base);
  bool decreasing = pts[0].mean_frobenius_error > pts[1].mean_frobenius_error &&
                    pts[1].mean_frobenius_error > pts[2].mean_frobenius_error;
  bool zero_monotone = pts[0].mean_zero_fraction <= pts[1].mean_zero_fraction + 1e-12 &&
                       pts[1].mean_zero_fraction <= pts[2].mean_zero_fraction + 1e-12;
  bool zero_high = pts[2].mean_zero_fraction >= 0.95;
  report("criterion 7 (consistency and sparsistency trends)",
         decreasing && zero_monotone && zero_high,
         fmt("frobenius %.3f > %.3f > %.3f; zero fraction %.4f <= %.4f <= %.4f "
             "(last >= 0.95)",
             pts[0].mean_frobenius_error, pts[1].mean_frobenius_error,
             pts[2].mean_frobenius_error, pts[0].mean_zero_fraction,
             pts[1].mean_zero_fraction, pts[2].mean_zero_fraction));
}

// --------------------------------------------------------------- gate 10

void criterion_permutation_calibration() {
  std::size_t rejections = 0;
  FitRecipe recipe;
  recipe.center = false;
  for (int run = 0; run < 100; ++run) {
    NetworkSpec net = generate_network(Mechanism::scale_free, 20, 5000 + run);
    DataMatrix a = sample_gaussian(net.theta0, 100, 6000 + run);
    DataMatrix b = sample_gaussian(net.theta0, 100, 7000 + run);
    PermTestResult r = permutation_test(a, b, 99, 8000 + run, recipe, false, 2);
    if (r.p_density <= 0.05) ++rejections;
  }
  report("criterion 10 (permutation calibration)", rejections <= 10,
         fmt("density-difference p <= 0.05 in %zu of 100 null runs (allowed 10)",
             rejections));
}

// ----------------------------------------------------- gates 4, 5 and 2

struct TableRun {
  ExperimentResult result;
  ExperimentConfig cfg;
};

TableRun run_table(Mechanism m, std::size_t p, std::size_t reps,
                   const std::vector<Method>& methods) {
  ExperimentConfig cfg;
  cfg.mechanism = m;
  cfg.n = 100;
  cfg.p = p;
  cfg.replicates = reps;
  cfg.methods = methods;
  cfg.init = InitialEstimator::ridge_auto();
  cfg.seed = 424242;
  cfg.jobs = 2;
  return TableRun{run_experiment(cfg), cfg};
}

const AggregateRow& row_of(const ExperimentResult& r, Method m) {
  for (const auto& row : r.rows)
    if (row.method == m) return row;
  throw error("method row missing");
}

void print_table(const char* name, const ExperimentResult& r) {
  std::printf("  %s\n", name);
  for (const auto& row : r.rows)
    std::printf(
        "    %-20s tpr %6.2f (%.2f)  tnr %6.2f (%.2f)  hub-edge %6.2f (%.2f)  "
        "hub/nonhub %5.1f/%5.1f  edges %7.2f (%.2f)  fro %6.3f (%.3f)  "
        "fro-full %6.3f\n",
        method_to_string(row.method).c_str(), 100 * row.tpr.mean, 100 * row.tpr.se,
        100 * row.tnr.mean, 100 * row.tnr.se, row.hub_edge_pct.mean,
        row.hub_edge_pct.se, row.hub_node_pct.mean, row.nonhub_node_pct.mean,
        row.edges.mean, row.edges.se, row.frobenius.mean, row.frobenius.se,
        row.frobenius_full.mean);
  std::fflush(stdout);
}

void criteria_tables() {
  const std::vector<Method> all = {Method::glasso, Method::ada_glasso,
                                   Method::hw_glasso, Method::two_step,
                                   Method::two_step_known};
  double t0 = now_s();
  TableRun e1 = run_table(Mechanism::i, 50, 100, all);
  double e1_time = now_s() - t0;
  TableRun e2 = run_table(Mechanism::ii, 50, 100, all);
  TableRun e3 = run_table(Mechanism::i, 100, 100, all);
  TableRun e4 = run_table(Mechanism::ii, 100, 100, all);

  std::printf("  reference reproduction tables (n=100, 100 replicates):\n");
  print_table("mechanism i, p=50", e1.result);
  print_table("mechanism ii, p=50", e2.result);
  print_table("mechanism i, p=100", e3.result);
  print_table("mechanism ii, p=100", e4.result);

  // gate 4: the reference hub-weighted row at mechanism i, p=50
  const AggregateRow& hw1 = row_of(e1.result, Method::hw_glasso);
  bool tpr_ok = std::abs(100 * hw1.tpr.mean - 87.06) <= 3.0;
  bool tnr_ok = std::abs(100 * hw1.tnr.mean - 98.67) <= 1.0;
  bool fro_ok = std::abs(hw1.frobenius_full.mean - 1.14) <= 0.25;
  bool time_ok = e1_time < 1200.0;
  report("criterion 4 (reference-table reproduction)",
         tpr_ok && tnr_ok && fro_ok && time_ok,
         fmt("tpr %.2f (target 87.06+-3), tnr %.2f (98.67+-1), frobenius %.3f "
             "(1.14+-0.25, trace variant; off-diagonal %.3f), %.0fs (budget 1200s)",
             100 * hw1.tpr.mean, 100 * hw1.tnr.mean, hw1.frobenius_full.mean,
             hw1.frobenius.mean, e1_time));

  // gate 5: orderings across the four configurations
  bool order_ok = true;
  std::string detail;
  for (auto* tr : {&e1, &e2, &e3, &e4}) {
    const AggregateRow& g = row_of(tr->result, Method::glasso);
    const AggregateRow& h = row_of(tr->result, Method::hw_glasso);
    bool fro = h.frobenius.mean < g.frobenius.mean;
    bool tnr = h.tnr.mean > g.tnr.mean;
    double best_other = 0.0;
    for (const auto& row : tr->result.rows)
      if (row.method != Method::two_step_known)
        best_other = std::max(best_other, row.hub_edge_pct.mean);
    const AggregateRow& k = row_of(tr->result, Method::two_step_known);
    bool hub = k.hub_edge_pct.mean >= best_other;
    order_ok = order_ok && fro && tnr && hub;
    detail +=
        fmt("[%s p=%zu: fro %.3f<%.3f %s, tnr %.3f>%.3f %s, known-hub %.1f>=%.1f %s] ",
            mechanism_to_string(tr->cfg.mechanism).c_str(), tr->cfg.p,
            h.frobenius.mean, g.frobenius.mean, fro ? "y" : "N", 100 * h.tnr.mean,
            100 * g.tnr.mean, tnr ? "y" : "N", k.hub_edge_pct.mean, best_other,
            hub ? "y" : "N");
  }
  report("criterion 5 (method ordering)", order_ok, detail);

  // paired per-replicate comparison: known hubs against the one-step fit
  std::size_t wins = 0, total = 0;
  std::vector<double> hub_by_rep(e1.cfg.replicates, -1.0);
  for (const auto& rec : e1.result.log)
    if (rec.ok && rec.method == Method::hw_glasso)
      hub_by_rep[rec.replicate] = rec.metrics.hub_edge_pct;
  for (const auto& rec : e1.result.log)
    if (rec.ok && rec.method == Method::two_step_known &&
        hub_by_rep[rec.replicate] >= 0) {
      ++total;
      if (rec.metrics.hub_edge_pct >= hub_by_rep[rec.replicate]) ++wins;
    }
  report("criterion 5b (paired known-hub gain)",
         total >= 95 && wins * 100 >= 90 * total,
         fmt("known-hub recovery >= one-step in %zu of %zu paired replicates", wins,
             total));

  // scale-free property check (absolute table values out of scope)
  TableRun e5 =
      run_table(Mechanism::scale_free, 50, 100, {Method::glasso, Method::hw_glasso});
  print_table("mechanism iv, p=50", e5.result);
  const AggregateRow& g5 = row_of(e5.result, Method::glasso);
  const AggregateRow& h5 = row_of(e5.result, Method::hw_glasso);
  report("criterion 12 (scale-free hub-edge property)",
         h5.hub_edge_pct.mean >= g5.hub_edge_pct.mean,
         fmt("hub-edge %.2f (hw) vs %.2f (glasso) over 100 replicates at p=50",
             h5.hub_edge_pct.mean, g5.hub_edge_pct.mean));

  // supplementary evidence (not a gate): the same comparison where mild hubs
  // actually separate the methods
  TableRun e6 =
      run_table(Mechanism::scale_free, 100, 100, {Method::glasso, Method::hw_glasso});
  print_table("mechanism iv, p=100 (supplementary)", e6.result);
  const AggregateRow& g6 = row_of(e6.result, Method::glasso);
  const AggregateRow& h6 = row_of(e6.result, Method::hw_glasso);
  std::printf("INFO  scale-free hub-edge at p=100: %.2f (hw) vs %.2f (glasso)\n",
              h6.hub_edge_pct.mean, g6.hub_edge_pct.mean);

  for (auto* tr : {&e1, &e2, &e3, &e4, &e5, &e6}) note_kkt(tr->result.max_kkt);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_oracle_equivalence();
  criterion_zero_penalty();
  criterion_ada_collapse();
  criterion_generators();
  criterion_clr();
  criterion_block_screening();
  criterion_rate_trends();
  criterion_permutation_calibration();
  criteria_tables();
  report("criterion 2 (kkt certificates)", g_max_kkt <= 1e-4,
         fmt("max first-order violation across every fit in this suite: %.2e",
             g_max_kkt));
  std::printf("%s (%d failing)\n",
              g_failures == 0 ? "ALL GATES PASS" : "GATES FAILING", g_failures);
  return g_failures == 0 ? 0 : 1;
}
