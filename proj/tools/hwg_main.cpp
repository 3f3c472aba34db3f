// hwg: hub-weighted sparse precision-matrix estimation toolkit.
#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "hwg/benchmark.hpp"
#include "hwg/io.hpp"

namespace fs = std::filesystem;
using namespace hwg;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string timestamp_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct ManifestWriter {
  std::string command;
  std::string out_dir;
  nlohmann::json config;
  std::vector<std::string> outputs;

  ManifestWriter(std::string cmd, std::string dir)
      : command(std::move(cmd)), out_dir(std::move(dir)) {}

  void add(const std::string& name) { outputs.push_back(name); }
  // outputs are valid once the manifest lands, so it is written last
  void finish() const {
    nlohmann::json j;
    j["tool"] = "hwg";
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = config;
    j["timestamp_utc"] = timestamp_utc();
    j["outputs"] = outputs;
    write_json_atomic(out_dir + "/manifest.json", j);
  }
};

std::string resolve_out_dir(std::string out) {
  if (out.empty()) {
    const char* env = std::getenv("HWG_OUT_DIR");
    if (env && *env) out = env;
  }
  if (out.empty()) throw data_error("no output directory (use --out or HWG_OUT_DIR)");
  fs::create_directories(out);
  return out;
}

// Common knobs of the one-step estimator shared by several commands.
struct RecipeFlags {
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  std::string init = "auto";
  std::size_t grid_size = 30;
  double grid_min_ratio = 0.01;
  bool no_center = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--gamma1", gamma1, "first weight exponent")->check(CLI::NonNegativeNumber);
    cmd->add_option("--gamma2", gamma2, "row-sum weight exponent")->check(CLI::NonNegativeNumber);
    cmd->add_option("--init", init,
                    "initial estimator: auto, inverse, ridge[:alpha], glasso[:lambda0]");
    cmd->add_option("--grid-size", grid_size, "tuning grid points")->check(CLI::PositiveNumber);
    cmd->add_option("--grid-min-ratio", grid_min_ratio,
                    "smallest grid value as a fraction of the largest")
        ->check(CLI::Range(1e-6, 1.0));
    cmd->add_flag("--no-center", no_center, "use the uncentered covariance");
  }

  InitialEstimator initializer(std::size_t n, std::size_t p) const {
    if (init == "auto")
      return n > p ? InitialEstimator::inverse() : InitialEstimator::ridge_auto();
    if (init == "inverse") return InitialEstimator::inverse();
    if (init == "ridge") return InitialEstimator::ridge_auto();
    if (init.rfind("ridge:", 0) == 0)
      return InitialEstimator::ridge(std::stod(init.substr(6)));
    if (init == "glasso") return InitialEstimator::glasso_init();
    if (init.rfind("glasso:", 0) == 0)
      return InitialEstimator::glasso_init(std::stod(init.substr(7)));
    throw data_error("unknown initializer '" + init + "'");
  }

  FitRecipe recipe(std::size_t n, std::size_t p) const {
    FitRecipe r;
    r.gamma1 = gamma1;
    r.gamma2 = gamma2;
    r.init = initializer(n, p);
    r.grid_size = grid_size;
    r.grid_min_ratio = grid_min_ratio;
    r.center = !no_center;
    return r;
  }
};

PenaltyMatrix penalty_from_csv(const std::string& path, std::size_t p) {
  Matrix full = read_matrix_csv(path, nullptr, /*allow_inf=*/true);
  if (full.rows() != p || full.cols() != p)
    throw data_error("penalty dimensions do not match");
  PenaltyMatrix rho(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      if (full(i, j) != full(j, i))
        throw data_error("penalty matrix is not symmetric");
      rho.set(i, j, full(i, j));
    }
  return rho;
}

void write_penalty_csv(const std::string& path, const PenaltyMatrix& rho) {
  Matrix full(rho.dim(), rho.dim());
  for (std::size_t i = 0; i < rho.dim(); ++i)
    for (std::size_t j = 0; j < rho.dim(); ++j) full(i, j) = rho(i, j);
  write_matrix_csv(path, full);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string mechanism;
  std::size_t p = 50;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  std::string out = resolve_out_dir(a.out);
  Mechanism m = mechanism_from_string(a.mechanism);
  NetworkSpec net = generate_network(m, a.p, a.seed);
  write_network_dir(out, net, m, a.seed);

  ManifestWriter mw{"simulate", out};
  mw.config = {{"mechanism", a.mechanism}, {"p", a.p}, {"seed", a.seed}};
  mw.add("adjacency.csv");
  mw.add("theta0.csv");
  mw.add("hubs.json");
  mw.add("meta.json");
  mw.finish();
  return 0;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string data_path, cov_path;
  std::size_t n = 0;
  std::string method = "hw";
  RecipeFlags recipe;
  double fixed_lambda = 0.0;
  bool standardize = false;
  bool correlation = false;
  std::string hub_rule = "threshold";
  double k_percent = 10.0;
  std::string known_hubs_path;
  std::size_t pair_grid_size = 10;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_fit(const FitArgs& a) {
  std::string out = resolve_out_dir(a.out);
  if (a.data_path.empty() == a.cov_path.empty())
    throw data_error("provide exactly one of --data or --cov");

  SymMatrix s;
  std::size_t n = 0;
  std::vector<std::string> labels;
  std::vector<double> rescale;  // per-variable inverse scale for the estimate
  if (!a.data_path.empty()) {
    std::vector<std::string> header;
    Matrix x = read_matrix_csv(a.data_path, &header);
    DataMatrix data(std::move(x), header);
    labels = data.labels;
    n = data.n();
    if (a.standardize) {
      auto corr = sample_correlation(data);
      Matrix scaled = data.values;
      for (std::size_t i = 0; i < data.n(); ++i)
        for (std::size_t j = 0; j < data.p(); ++j) scaled(i, j) /= corr.sd[j];
      data = DataMatrix(std::move(scaled), labels);
    }
    if (a.correlation) {
      auto corr = sample_correlation(data);
      s = corr.r;
      rescale = corr.sd;
    } else {
      s = sample_covariance(data, !a.recipe.no_center);
    }
  } else {
    if (a.n < 2) throw data_error("--cov input needs --n (sample size for BIC)");
    s = read_sym_csv(a.cov_path);
    n = a.n;
  }
  const std::size_t p = s.dim();
  SolverConfig solver;

  WeightMatrix weights;
  SymMatrix theta_tilde;
  bool have_tilde = false;
  if (a.method == "glasso") {
    weights = WeightMatrix::uniform(p);
  } else if (a.method == "ada" || a.method == "hw" || a.method == "two-step") {
    theta_tilde = initial_estimate(s, n, a.recipe.initializer(n, p), solver);
    have_tilde = true;
    double g2 = (a.method == "ada") ? 0.0 : a.recipe.gamma2;
    weights = hub_lasso_weights(theta_tilde, a.recipe.gamma1, g2);
  } else {
    throw data_error("unknown method '" + a.method + "'");
  }

  FitResult fit;
  SelectionReport report;
  double lambda = a.fixed_lambda;
  PenaltyMatrix chosen_penalty;
  if (a.fixed_lambda > 0.0) {
    chosen_penalty = weights.scaled(a.fixed_lambda);
    fit = fit_weighted_glasso(s, chosen_penalty, solver);
  } else {
    Grid grid = default_lambda_grid(s, weights, a.recipe.grid_size, a.recipe.grid_min_ratio);
    auto sel = select_lambda(s, weights, grid, n, solver);
    fit = std::move(sel.first);
    report = std::move(sel.second);
    lambda = report.points[report.chosen].lambda1;
    chosen_penalty = weights.scaled(lambda);
  }

  ManifestWriter mw{"fit", out};
  mw.config = {{"method", a.method},           {"gamma1", a.recipe.gamma1},
               {"gamma2", a.recipe.gamma2},    {"init", a.recipe.init},
               {"grid_size", a.recipe.grid_size}, {"seed", a.seed},
               {"standardize", a.standardize}, {"correlation", a.correlation},
               {"n", n},                        {"p", p}};

  nlohmann::json fj = fit_summary_json(fit);
  fj["lambda"] = lambda;
  fj["method"] = a.method;

  HubSet hubs;
  if (a.method == "two-step") {
    HubRule rule = HubRule::threshold;
    HubSet known;
    const HubSet* known_ptr = nullptr;
    if (!a.known_hubs_path.empty()) {
      known = hubset_from_json(read_json(a.known_hubs_path));
      known_ptr = &known;
      rule = HubRule::known;
    } else if (a.hub_rule == "kmeans") {
      rule = HubRule::kmeans;
    } else if (a.hub_rule.rfind("threshold", 0) != 0) {
      throw data_error("unknown hub rule '" + a.hub_rule + "'");
    }
    double kpct = a.k_percent;
    if (a.hub_rule.rfind("threshold:", 0) == 0)
      kpct = std::stod(a.hub_rule.substr(10));

    write_sym_csv(out + "/first_theta.csv", fit.theta, labels);
    write_json_atomic(out + "/first_fit.json", fj);
    mw.add("first_theta.csv");
    mw.add("first_fit.json");

    WeightMatrix uniform = WeightMatrix::uniform(p);
    Grid pair_grid =
        default_lambda_grid(s, uniform, a.pair_grid_size, a.recipe.grid_min_ratio);
    TwoStepResult ts = fit_two_step(s, fit, rule, kpct, pair_grid, pair_grid, n,
                                    solver, known_ptr, a.seed);
    fit = std::move(ts.fit);
    hubs = std::move(ts.hubs);
    report = std::move(ts.report);
    lambda = 0.0;
    chosen_penalty = two_step_penalty(hubs, p, report.points[report.chosen].lambda1,
                                      report.points[report.chosen].lambda2,
                                      TwoStepWeightMode::flat);
    fj = fit_summary_json(fit);
    fj["method"] = a.method;
    fj["lambda1"] = report.points[report.chosen].lambda1;
    fj["lambda2"] = report.points[report.chosen].lambda2;
    write_json_atomic(out + "/hubs.json", hubset_to_json(hubs));
    mw.add("hubs.json");
  }

  // rescale a correlation-based estimate back to the original units
  SymMatrix theta_out = fit.theta;
  if (!rescale.empty()) {
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double v = fit.theta(i, j);
        theta_out.set(i, j, v == 0.0 ? 0.0 : v / (rescale[i] * rescale[j]));
      }
    write_sym_csv(out + "/theta_correlation_scale.csv", fit.theta, labels);
    mw.add("theta_correlation_scale.csv");
  }

  write_sym_csv(out + "/theta.csv", theta_out, labels);
  write_edge_list_tsv(out + "/edges.tsv", theta_out, labels);
  write_penalty_csv(out + "/penalty.csv", chosen_penalty);
  write_sym_csv(out + "/cov.csv", s, labels);
  if (have_tilde) {
    write_sym_csv(out + "/theta_tilde.csv", theta_tilde, labels);
    mw.add("theta_tilde.csv");
    write_weights_csv(out + "/weights.csv", weights);
    mw.add("weights.csv");
  }
  write_json_atomic(out + "/fit.json", fj);
  if (!report.points.empty()) {
    write_json_atomic(out + "/selection.json", selection_report_json(report));
    write_selection_path_csv(out + "/selection_path.csv", report);
    mw.add("selection.json");
    mw.add("selection_path.csv");
  }
  mw.add("theta.csv");
  mw.add("edges.tsv");
  mw.add("penalty.csv");
  mw.add("cov.csv");
  mw.add("fit.json");
  mw.finish();
  return 0;
}

// --------------------------------------------------------------------- kkt

struct KktArgs {
  std::string cov_path, theta_path, penalty_path;
  double lambda = 0.0;
};

int cmd_kkt(const KktArgs& a) {
  SymMatrix s = read_sym_csv(a.cov_path);
  SymMatrix theta = read_sym_csv(a.theta_path);
  PenaltyMatrix rho(s.dim());
  if (!a.penalty_path.empty())
    rho = penalty_from_csv(a.penalty_path, s.dim());
  else if (a.lambda > 0.0)
    rho = WeightMatrix::uniform(s.dim()).scaled(a.lambda);
  double resid = kkt_residual(s, theta, rho);
  std::cout << format_double(resid) << "\n";
  return 0;
}

// --------------------------------------------------------------- benchmark

struct BenchmarkArgs {
  std::string mechanism = "i";
  std::size_t n = 100, p = 50, reps = 100;
  std::string methods = "glasso,ada,hw,two-step,two-step-known";
  RecipeFlags recipe;
  std::size_t pair_grid_size = 10;
  double k_percent = 10.0;
  std::string hub_rule = "threshold";
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
};

int cmd_benchmark(const BenchmarkArgs& a) {
  std::string out = resolve_out_dir(a.out);
  ExperimentConfig cfg;
  cfg.mechanism = mechanism_from_string(a.mechanism);
  cfg.n = a.n;
  cfg.p = a.p;
  cfg.replicates = a.reps;
  cfg.methods.clear();
  {
    std::string rest = a.methods;
    while (!rest.empty()) {
      auto pos = rest.find(',');
      std::string tok = rest.substr(0, pos);
      if (!tok.empty()) cfg.methods.push_back(method_from_string(tok));
      rest = (pos == std::string::npos) ? "" : rest.substr(pos + 1);
    }
  }
  cfg.gamma1 = a.recipe.gamma1;
  cfg.gamma2 = a.recipe.gamma2;
  cfg.init = a.recipe.initializer(a.n, a.p);
  cfg.grid_size = a.recipe.grid_size;
  cfg.grid_min_ratio = a.recipe.grid_min_ratio;
  cfg.pair_grid_size = a.pair_grid_size;
  cfg.k_percent = a.k_percent;
  cfg.hub_rule = a.hub_rule == "kmeans" ? HubRule::kmeans : HubRule::threshold;
  cfg.seed = a.seed;
  cfg.jobs = a.jobs;

  ExperimentResult result = run_experiment(cfg);
  write_aggregate_csv(out + "/table.csv", result);
  write_replicate_log_csv(out + "/replicates.csv", result);

  ManifestWriter mw{"benchmark", out};
  mw.config = {{"mechanism", a.mechanism},
               {"n", a.n},
               {"p", a.p},
               {"replicates", a.reps},
               {"methods", a.methods},
               {"gamma1", a.recipe.gamma1},
               {"gamma2", a.recipe.gamma2},
               {"init", a.recipe.init},
               {"grid_size", a.recipe.grid_size},
               {"grid_min_ratio", a.recipe.grid_min_ratio},
               {"pair_grid_size", a.pair_grid_size},
               {"seed", a.seed},
               {"jobs", a.jobs},
               {"max_kkt", result.max_kkt},
               {"failed_replicates", result.failed_replicates}};
  mw.add("table.csv");
  mw.add("replicates.csv");
  mw.finish();
  return 0;
}

// -------------------------------------------------------------------- rate

struct RateArgs {
  std::string mechanism = "ii";
  std::size_t p = 30, reps = 50;
  std::string n_list = "100,400,1600";
  RecipeFlags recipe{.init = "glasso"};  // the consistent initial estimator
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
};

int cmd_rate(const RateArgs& a) {
  std::string out = resolve_out_dir(a.out);
  std::vector<std::size_t> ns;
  {
    std::string rest = a.n_list;
    while (!rest.empty()) {
      auto pos = rest.find(',');
      std::string tok = rest.substr(0, pos);
      if (!tok.empty()) ns.push_back(static_cast<std::size_t>(std::stoull(tok)));
      rest = (pos == std::string::npos) ? "" : rest.substr(pos + 1);
    }
  }
  ExperimentConfig base;
  base.gamma1 = a.recipe.gamma1;
  base.gamma2 = a.recipe.gamma2;
  base.init = a.recipe.initializer(ns.empty() ? 100 : ns.front(), a.p);
  base.grid_size = a.recipe.grid_size;
  base.grid_min_ratio = a.recipe.grid_min_ratio;
  base.jobs = a.jobs;
  auto points =
      rate_experiment(mechanism_from_string(a.mechanism), a.p, ns, a.reps, a.seed, base);
  write_rate_csv(out + "/rate.csv", points);

  ManifestWriter mw{"rate", out};
  mw.config = {{"mechanism", a.mechanism}, {"p", a.p},       {"n_list", a.n_list},
               {"replicates", a.reps},     {"seed", a.seed}, {"jobs", a.jobs}};
  mw.add("rate.csv");
  mw.finish();
  return 0;
}

// --------------------------------------------------------- stability / clr

struct StabilityArgs {
  std::string data_path, abundance_path;
  double zero_replacement = 0.5;
  std::size_t B = 100;
  double threshold = 0.8;
  RecipeFlags recipe;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
};

DataMatrix load_pipeline_data(const std::string& data_path,
                              const std::string& abundance_path,
                              double zero_replacement) {
  if (data_path.empty() == abundance_path.empty())
    throw data_error("provide exactly one of --data or --abundance");
  if (!abundance_path.empty())
    return clr_transform(read_abundance_csv(abundance_path), zero_replacement);
  std::vector<std::string> header;
  Matrix x = read_matrix_csv(data_path, &header);
  return DataMatrix(std::move(x), header);
}

int cmd_stability(const StabilityArgs& a) {
  std::string out = resolve_out_dir(a.out);
  DataMatrix data =
      load_pipeline_data(a.data_path, a.abundance_path, a.zero_replacement);
  FitRecipe recipe = a.recipe.recipe(data.n(), data.p());
  StabilityResult stab = bootstrap_stability(data, recipe, a.B, a.threshold, a.seed, a.jobs);

  // final network: the full-data fit restricted to stable edges
  RecipeFit full = run_recipe(data, recipe);
  SymMatrix network(data.p());
  for (std::size_t i = 0; i < data.p(); ++i) network.set(i, i, full.fit.theta(i, i));
  for (auto [i, j] : stab.stable_edges) network.set(i, j, full.fit.theta(i, j));

  write_json_atomic(out + "/stability.json", stability_json(stab, data.labels));
  write_sym_csv(out + "/proportions.csv", stab.proportion, data.labels);
  write_edge_list_tsv(out + "/network_edges.tsv", network, data.labels,
                      &stab.proportion);
  nlohmann::json fj = fit_summary_json(full.fit);
  fj["lambda"] = full.lambda;
  write_json_atomic(out + "/fit.json", fj);

  ManifestWriter mw{"stability", out};
  mw.config = {{"B", a.B},
               {"threshold", a.threshold},
               {"seed", a.seed},
               {"jobs", a.jobs},
               {"gamma1", a.recipe.gamma1},
               {"gamma2", a.recipe.gamma2},
               {"init", a.recipe.init},
               {"zero_replacement", a.zero_replacement}};
  mw.add("stability.json");
  mw.add("proportions.csv");
  mw.add("network_edges.tsv");
  mw.add("fit.json");
  mw.finish();
  return 0;
}

struct PermTestArgs {
  std::string group_a, group_b;
  bool abundance = false;
  double zero_replacement = 0.5;
  std::size_t R = 1000;
  RecipeFlags recipe;
  bool reselect = false;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
};

int cmd_permtest(const PermTestArgs& a) {
  std::string out = resolve_out_dir(a.out);
  DataMatrix ga = a.abundance
                      ? load_pipeline_data("", a.group_a, a.zero_replacement)
                      : load_pipeline_data(a.group_a, "", a.zero_replacement);
  DataMatrix gb = a.abundance
                      ? load_pipeline_data("", a.group_b, a.zero_replacement)
                      : load_pipeline_data(a.group_b, "", a.zero_replacement);
  FitRecipe recipe = a.recipe.recipe(std::min(ga.n(), gb.n()), ga.p());
  PermTestResult r = permutation_test(ga, gb, a.R, a.seed, recipe, a.reselect, a.jobs);
  write_json_atomic(out + "/permtest.json", permtest_json(r, ga.labels));

  ManifestWriter mw{"permtest", out};
  mw.config = {{"R", a.R},          {"seed", a.seed},
               {"jobs", a.jobs},    {"reselect", a.reselect},
               {"gamma1", a.recipe.gamma1}, {"gamma2", a.recipe.gamma2},
               {"abundance", a.abundance}};
  mw.add("permtest.json");
  mw.finish();
  return 0;
}

struct ClrArgs {
  std::string abundance_path;
  double zero_replacement = 0.5;
  std::string out;
};

int cmd_clr(const ClrArgs& a) {
  std::string out = resolve_out_dir(a.out);
  DataMatrix data = clr_transform(read_abundance_csv(a.abundance_path), a.zero_replacement);
  write_matrix_csv(out + "/clr.csv", data.values, data.labels);
  ManifestWriter mw{"clr", out};
  mw.config = {{"zero_replacement", a.zero_replacement}};
  mw.add("clr.csv");
  mw.finish();
  return 0;
}

}  // namespace

namespace {

// Expands `--config file.json` (a flat JSON object of long-option values)
// into ordinary arguments right after the subcommand, so explicit flags win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] != "--config") continue;
    nlohmann::json j = read_json(args[i + 1]);
    if (!j.is_object()) throw data_error("config file must be a JSON object");
    std::vector<std::string> injected;
    for (auto& [key, value] : j.items()) {
      if (value.is_boolean()) {
        if (value.get<bool>()) injected.push_back("--" + key);
      } else {
        injected.push_back("--" + key);
        injected.push_back(value.is_string() ? value.get<std::string>()
                                             : value.dump());
      }
    }
    args.erase(args.begin() + i, args.begin() + i + 2);
    args.insert(args.begin() + i, injected.begin(), injected.end());
    break;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hub-weighted graphical lasso toolkit"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "generate a ground-truth network");
  c_sim->add_option("--mechanism", sim.mechanism, "i, ii, iii or iv")->required();
  c_sim->add_option("--p", sim.p, "dimension")->required();
  c_sim->add_option("--seed", sim.seed, "master seed")->required();
  c_sim->add_option("--out", sim.out, "output directory");

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "estimate a sparse precision matrix");
  c_fit->add_option("--data", fit.data_path, "observations CSV (optional header)");
  c_fit->add_option("--cov", fit.cov_path, "covariance CSV");
  c_fit->add_option("--n", fit.n, "sample size behind --cov");
  c_fit->add_option("--method", fit.method, "glasso, ada, hw or two-step");
  fit.recipe.attach(c_fit);
  c_fit->add_option("--lambda", fit.fixed_lambda, "skip selection, fit at this level");
  c_fit->add_flag("--standardize", fit.standardize, "scale columns to unit variance first");
  c_fit->add_flag("--correlation", fit.correlation,
                  "fit on the correlation matrix, rescale the estimate back");
  c_fit->add_option("--hub-rule", fit.hub_rule, "threshold[:k] or kmeans (two-step)");
  c_fit->add_option("--known-hubs", fit.known_hubs_path, "hub-set JSON (two-step)");
  c_fit->add_option("--pair-grid-size", fit.pair_grid_size, "per-axis grid (two-step)");
  c_fit->add_option("--seed", fit.seed, "seed (k-means hub rule)");
  c_fit->add_option("--out", fit.out, "output directory");

  KktArgs kkt;
  auto* c_kkt = app.add_subcommand("kkt", "first-order optimality check");
  c_kkt->add_option("--cov", kkt.cov_path)->required();
  c_kkt->add_option("--theta", kkt.theta_path)->required();
  c_kkt->add_option("--penalty", kkt.penalty_path, "penalty CSV (inf allowed)");
  c_kkt->add_option("--lambda", kkt.lambda, "uniform penalty level instead");

  BenchmarkArgs bench;
  auto* c_bench = app.add_subcommand("benchmark", "simulation study");
  c_bench->add_option("--mechanism", bench.mechanism)->required();
  c_bench->add_option("--n", bench.n)->required();
  c_bench->add_option("--p", bench.p)->required();
  c_bench->add_option("--reps", bench.reps);
  c_bench->add_option("--methods", bench.methods, "comma-separated subset");
  bench.recipe.attach(c_bench);
  c_bench->add_option("--pair-grid-size", bench.pair_grid_size);
  c_bench->add_option("--k-percent", bench.k_percent);
  c_bench->add_option("--hub-rule", bench.hub_rule);
  c_bench->add_option("--seed", bench.seed)->required();
  c_bench->add_option("--jobs", bench.jobs);
  c_bench->add_option("--out", bench.out);

  RateArgs rate;
  auto* c_rate = app.add_subcommand("rate", "error decay over a sample-size sweep");
  c_rate->add_option("--mechanism", rate.mechanism);
  c_rate->add_option("--p", rate.p);
  c_rate->add_option("--n-list", rate.n_list);
  c_rate->add_option("--reps", rate.reps);
  rate.recipe.attach(c_rate);
  c_rate->add_option("--seed", rate.seed)->required();
  c_rate->add_option("--jobs", rate.jobs);
  c_rate->add_option("--out", rate.out);

  StabilityArgs stab;
  auto* c_stab = app.add_subcommand("stability", "bootstrap edge reproducibility");
  c_stab->add_option("--data", stab.data_path, "data CSV (already transformed)");
  c_stab->add_option("--abundance", stab.abundance_path, "abundance CSV (CLR applied)");
  c_stab->add_option("--zero-replacement", stab.zero_replacement);
  c_stab->add_option("--B", stab.B, "bootstrap replicates");
  c_stab->add_option("--threshold", stab.threshold, "retention proportion");
  stab.recipe.attach(c_stab);
  c_stab->add_option("--seed", stab.seed)->required();
  c_stab->add_option("--jobs", stab.jobs);
  c_stab->add_option("--out", stab.out);

  PermTestArgs perm;
  auto* c_perm = app.add_subcommand("permtest", "group-difference permutation test");
  c_perm->add_option("--group-a", perm.group_a)->required();
  c_perm->add_option("--group-b", perm.group_b)->required();
  c_perm->add_flag("--abundance", perm.abundance, "inputs are abundance tables");
  c_perm->add_option("--zero-replacement", perm.zero_replacement);
  c_perm->add_option("--R", perm.R, "permutations");
  perm.recipe.attach(c_perm);
  c_perm->add_flag("--reselect", perm.reselect, "re-tune per permutation (slow, exact)");
  c_perm->add_option("--seed", perm.seed)->required();
  c_perm->add_option("--jobs", perm.jobs);
  c_perm->add_option("--out", perm.out);

  ClrArgs clr;
  auto* c_clr = app.add_subcommand("clr", "centered log-ratio transform");
  c_clr->add_option("--abundance", clr.abundance_path)->required();
  c_clr->add_option("--zero-replacement", clr.zero_replacement);
  c_clr->add_option("--out", clr.out);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
    if (*c_sim) return cmd_simulate(sim);
    if (*c_fit) return cmd_fit(fit);
    if (*c_kkt) return cmd_kkt(kkt);
    if (*c_bench) return cmd_benchmark(bench);
    if (*c_rate) return cmd_rate(rate);
    if (*c_stab) return cmd_stability(stab);
    if (*c_perm) return cmd_permtest(perm);
    if (*c_clr) return cmd_clr(clr);
    return 5;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const convergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 5;
  }
}
