#include "hwg/selection.hpp"

#include <cmath>
#include <limits>

#include "hwg/two_step.hpp"
#include "hwg/weights.hpp"

namespace hwg {

namespace {

const char* kBicNote =
    "bic = -n*(logdet(theta) - tr(s*theta)) + log(n)*edges; edges = nonzero "
    "strictly-upper-triangular entries (|x| > 1e-8); ties break toward the "
    "larger (sparser) lambda";

}  // namespace

void Grid::validate() const {
  if (values.empty()) throw data_error("tuning grid is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw data_error("tuning grid values must be positive and finite");
    if (i > 0 && values[i] > values[i - 1])
      throw data_error("tuning grid must be non-increasing");
  }
}

Grid Grid::log_spaced(double top, double bottom, std::size_t count) {
  if (!(top > 0.0) || !(bottom > 0.0) || bottom > top || count == 0)
    throw data_error("invalid log-spaced grid parameters");
  Grid g;
  g.values.resize(count);
  if (count == 1) {
    g.values[0] = top;
    return g;
  }
  double ratio = bottom / top;
  for (std::size_t k = 0; k < count; ++k)
    g.values[k] = top * std::pow(ratio, static_cast<double>(k) /
                                            static_cast<double>(count - 1));
  return g;
}

Grid default_lambda_grid(const SymMatrix& s, const WeightMatrix& w, std::size_t count,
                         double min_ratio) {
  // per-pair activation levels: pair (i,j) can enter once lambda < |s_ij|/w_ij
  std::vector<double> thresholds;
  for (std::size_t i = 0; i < s.dim(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double wij = w(i, j);
      double sij = std::abs(s(i, j));
      if (std::isfinite(wij) && wij > 0.0 && sij > 0.0)
        thresholds.push_back(sij / wij);
    }
  if (thresholds.empty()) return Grid::log_spaced(1.0, min_ratio, count);
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  double top = thresholds.front();
  double bottom = top * min_ratio;
  // weights spanning several decades push the useful range below top/100;
  // follow the level at which a quarter of the pairs could be active
  double q25 = thresholds[thresholds.size() / 4];
  bottom = std::min(bottom, std::max(q25, top * 1e-8));
  return Grid::log_spaced(top, bottom, count);
}

double bic_score(const SymMatrix& s, const SymMatrix& theta, std::size_t n) {
  if (s.dim() != theta.dim()) throw dimension_mismatch("bic_score: dimension mismatch");
  Cholesky c(theta);  // throws on non-PD theta
  double tr = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) {
    tr += s(i, i) * theta(i, i);
    for (std::size_t j = 0; j < i; ++j) tr += 2.0 * s(i, j) * theta(i, j);
  }
  double loglik = c.logdet() - tr;
  return -static_cast<double>(n) * loglik +
         std::log(static_cast<double>(n)) * static_cast<double>(edge_count(theta));
}

namespace {

// Shared path driver: fits a sequence of penalties, scores them, returns the
// winner.  Ties keep the first (hence largest-penalty) point.
struct PathState {
  SelectionReport report;
  FitResult best_fit;
  double best_bic = std::numeric_limits<double>::infinity();
  bool have_best = false;
  WarmStart warm;

  void visit(const SymMatrix& s, const PenaltyMatrix& penalty, std::size_t n,
             const SolverConfig& cfg, bool warm_start, double l1, double l2) {
    FitResult fit = fit_weighted_glasso(s, penalty, cfg,
                                        warm_start && warm.valid ? &warm : nullptr,
                                        warm_start ? &warm : nullptr);
    SelectionPoint pt;
    pt.lambda1 = l1;
    pt.lambda2 = l2;
    pt.objective = fit.objective;
    pt.edges = edge_count(fit.theta);
    pt.converged = fit.converged;
    pt.bic = bic_score(s, fit.theta, n);
    if (fit.converged && pt.bic < best_bic) {
      best_bic = pt.bic;
      best_fit = fit;
      have_best = true;
      report.chosen = report.points.size();
    }
    report.points.push_back(pt);
  }
};

}  // namespace

std::pair<FitResult, SelectionReport> select_lambda(const SymMatrix& s,
                                                    const WeightMatrix& weights,
                                                    const Grid& grid, std::size_t n,
                                                    const SolverConfig& cfg,
                                                    bool warm_start) {
  grid.validate();
  if (s.dim() != weights.dim())
    throw dimension_mismatch("select_lambda: dimension mismatch");
  PathState path;
  path.report.note = kBicNote;
  for (double lambda : grid.values)
    path.visit(s, weights.scaled(lambda), n, cfg, warm_start, lambda,
               std::numeric_limits<double>::quiet_NaN());
  if (!path.have_best) throw convergence_error("no tuning-grid point converged");
  return {std::move(path.best_fit), std::move(path.report)};
}

std::pair<FitResult, SelectionReport> select_lambda_pair(
    const SymMatrix& s, const std::vector<std::size_t>& hubs, const Grid& grid1,
    const Grid& grid2, std::size_t n, const SolverConfig& cfg,
    const PairPenaltyMode& mode) {
  grid1.validate();
  grid2.validate();
  const std::size_t p = s.dim();
  for (std::size_t h : hubs)
    if (h >= p) throw data_error("hub index out of range");
  HubSet hub_set;
  hub_set.indices = hubs;
  hub_set.method = HubSet::Method::known;

  auto penalty_for = [&](double l1, double l2) {
    if (mode.adaptive) {
      if (!mode.theta_tilde)
        throw data_error("adaptive two-level weights need an initial estimate");
      return two_step_penalty(hub_set, p, l1, l2, TwoStepWeightMode::adaptive,
                              mode.theta_tilde, mode.gamma1);
    }
    return two_step_penalty(hub_set, p, l1, l2, TwoStepWeightMode::flat, nullptr, 0.0);
  };

  PathState path;
  path.report.pair = true;
  path.report.note = kBicNote;
  const bool no_hubs = hubs.empty();
  const bool all_hubs = hubs.size() == p;
  if (no_hubs) {
    // lambda1 multiplies nothing; search the background axis only
    for (double l2 : grid2.values)
      path.visit(s, penalty_for(grid1.values.front(), l2), n, cfg, true,
                 grid1.values.front(), l2);
  } else if (all_hubs) {
    for (double l1 : grid1.values)
      path.visit(s, penalty_for(l1, grid2.values.front()), n, cfg, true, l1,
                 grid2.values.front());
  } else {
    for (double l1 : grid1.values)
      for (double l2 : grid2.values)
        path.visit(s, penalty_for(l1, l2), n, cfg, true, l1, l2);
  }
  if (!path.have_best) throw convergence_error("no tuning-grid point converged");
  return {std::move(path.best_fit), std::move(path.report)};
}

}  // namespace hwg
