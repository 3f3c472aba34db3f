#include "hwg/glasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hwg {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double mean_offdiag_abs(const SymMatrix& s) {
  const std::size_t p = s.dim();
  if (p < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) acc += std::abs(s(i, j));
  return 2.0 * acc / static_cast<double>(p * (p - 1));
}

struct PdFailure {};  // internal signal: escalate jitter and retry

// Block coordinate descent on one dense (sub)problem.
class GlassoCore {
 public:
  GlassoCore(const SymMatrix& s, const PenaltyMatrix& rho, const SolverConfig& cfg,
             double jitter)
      : p_(s.dim()), s_(s), rho_(rho), cfg_(cfg), jitter_(jitter) {
    W_.assign(p_ * p_, 0.0);
    B_.assign(p_ * p_, 0.0);
    theta_.assign(p_ * p_, 0.0);
    const std::size_t m = p_ - 1;
    V_.assign(m * m, 0.0);
    q_.assign(m, 0.0);
    b_.assign(m, 0.0);
    s12_.assign(m, 0.0);
    r12_.assign(m, 0.0);
    map_.assign(m, 0);
  }

  // Returns sweeps used; fills theta/W/B members.  converged() reports
  // whether both the covariance-change and KKT criteria were met.
  int run(const WarmStart* warm) {
    init(warm);
    const double scale = std::max(mean_offdiag_abs(s_), 1e-12);
    double outer_thr = cfg_.outer_tol * scale;
    double inner_thr = cfg_.inner_tol * scale;

    converged_ = false;
    int sweeps = 0;
    while (sweeps < cfg_.max_outer) {
      double delta = sweep(inner_thr);
      ++sweeps;
      if (delta <= outer_thr) {
        recover_theta();
        kkt_ = kkt_of_theta();
        if (kkt_ <= cfg_.kkt_target) {
          converged_ = true;
          break;
        }
        // not yet stationary enough: tighten and keep sweeping
        inner_thr = std::max(inner_thr * 0.1, 1e-16 * scale);
        outer_thr = std::max(outer_thr * 0.1, 1e-16 * scale);
      }
    }
    if (!converged_) {
      recover_theta();
      kkt_ = kkt_of_theta();
      converged_ = kkt_ <= cfg_.kkt_target;
    }
    return sweeps;
  }

  bool converged() const { return converged_; }
  double kkt() const { return kkt_; }
  double theta(std::size_t i, std::size_t j) const { return theta_[i * p_ + j]; }
  double sigma(std::size_t i, std::size_t j) const { return W_[i * p_ + j]; }
  double beta(std::size_t i, std::size_t j) const { return B_[i * p_ + j]; }

 private:
  void init(const WarmStart* warm) {
    if (warm && warm->valid && warm->sigma.dim() == p_) {
      for (std::size_t i = 0; i < p_; ++i)
        for (std::size_t j = 0; j < p_; ++j) {
          W_[i * p_ + j] = warm->sigma(i, j);
          B_[i * p_ + j] = warm->beta(i, j);
        }
    } else {
      for (std::size_t i = 0; i < p_; ++i)
        for (std::size_t j = 0; j < p_; ++j) W_[i * p_ + j] = s_(i, j);
    }
    for (std::size_t i = 0; i < p_; ++i) {
      double d = s_(i, i) + jitter_;
      if (!(d > 0.0)) throw data_error("covariance diagonal must be positive");
      W_[i * p_ + i] = d;  // held fixed: diagonal is unpenalized
      B_[i * p_ + i] = 0.0;
    }
    // a warm start from another penalty may carry coefficients on entries
    // this penalty excludes outright; those coordinates are never visited
    for (std::size_t i = 0; i < p_; ++i)
      for (std::size_t j = 0; j < p_; ++j)
        if (i != j && std::isinf(rho_(i, j))) B_[i * p_ + j] = 0.0;
  }

  // One pass over all columns; returns the mean absolute change of the
  // off-diagonal working covariance.
  double sweep(double inner_thr) {
    const std::size_t m = p_ - 1;
    double total_change = 0.0;
    for (std::size_t j = 0; j < p_; ++j) {
      // gather the subproblem for column j
      std::size_t k = 0;
      for (std::size_t i = 0; i < p_; ++i) {
        if (i == j) continue;
        map_[k] = i;
        s12_[k] = s_(i, j);
        r12_[k] = rho_(i, j);
        b_[k] = B_[i * p_ + j];
        ++k;
      }
      for (std::size_t a = 0; a < m; ++a) {
        const double* wrow = &W_[map_[a] * p_];
        double* vrow = &V_[a * m];
        for (std::size_t c = 0; c < m; ++c) vrow[c] = wrow[map_[c]];
      }
      std::fill(q_.begin(), q_.end(), 0.0);
      for (std::size_t a = 0; a < m; ++a)
        if (b_[a] != 0.0) {
          const double* vrow = &V_[a * m];
          for (std::size_t c = 0; c < m; ++c) q_[c] += vrow[c] * b_[a];
        }

      lasso_cd(inner_thr);

      // exact q = V b with the final coefficients, then write the column back
      std::fill(q_.begin(), q_.end(), 0.0);
      for (std::size_t a = 0; a < m; ++a)
        if (b_[a] != 0.0) {
          const double* vrow = &V_[a * m];
          for (std::size_t c = 0; c < m; ++c) q_[c] += vrow[c] * b_[a];
        }
      for (std::size_t c = 0; c < m; ++c) {
        std::size_t i = map_[c];
        total_change += std::abs(W_[i * p_ + j] - q_[c]);
        W_[i * p_ + j] = q_[c];
        W_[j * p_ + i] = q_[c];
        B_[i * p_ + j] = b_[c];
      }
    }
    return total_change / static_cast<double>(p_ * (p_ - 1));
  }

  // Coordinate descent with an active-set strategy; terminates when a full
  // pass moves no coordinate by more than inner_thr.
  void lasso_cd(double inner_thr) {
    const std::size_t m = p_ - 1;
    bool full = true;
    for (int pass = 0; pass < cfg_.max_inner; ++pass) {
      double maxd = 0.0;
      for (std::size_t a = 0; a < m; ++a) {
        if (!full && b_[a] == 0.0) continue;
        if (std::isinf(r12_[a])) continue;  // hard exclusion
        double vaa = V_[a * m + a];
        double g = s12_[a] - (q_[a] - vaa * b_[a]);
        double bn = soft_threshold(g, r12_[a]) / vaa;
        if (bn != b_[a]) {
          double d = bn - b_[a];
          const double* vrow = &V_[a * m];
          for (std::size_t c = 0; c < m; ++c) q_[c] += vrow[c] * d;
          b_[a] = bn;
          double ad = std::abs(d);
          if (ad > maxd) maxd = ad;
        }
      }
      if (full) {
        if (maxd <= inner_thr) return;
        full = false;
      } else if (maxd <= inner_thr) {
        full = true;  // verify on a full pass
      }
    }
  }

  void recover_theta() {
    for (std::size_t j = 0; j < p_; ++j) {
      double dot = 0.0;
      for (std::size_t i = 0; i < p_; ++i)
        if (i != j) dot += W_[i * p_ + j] * B_[i * p_ + j];
      double denom = W_[j * p_ + j] - dot;
      if (!(denom > 0.0)) throw PdFailure{};
      double tjj = 1.0 / denom;
      theta_[j * p_ + j] = tjj;
      for (std::size_t i = 0; i < p_; ++i) {
        if (i == j) continue;
        double bij = B_[i * p_ + j];
        theta_[i * p_ + j] = (bij == 0.0) ? 0.0 : -bij * tjj;
      }
    }
    // exact-zero-consistent symmetrization
    for (std::size_t i = 0; i < p_; ++i)
      for (std::size_t j = 0; j < i; ++j) {
        double a = theta_[i * p_ + j], c = theta_[j * p_ + i];
        double v = (a == 0.0 || c == 0.0) ? 0.0 : 0.5 * (a + c);
        theta_[i * p_ + j] = v;
        theta_[j * p_ + i] = v;
      }
  }

  double kkt_of_theta() const {
    SymMatrix t(p_);
    for (std::size_t i = 0; i < p_; ++i)
      for (std::size_t j = 0; j <= i; ++j) t.set(i, j, theta_[i * p_ + j]);
    Cholesky c = Cholesky::attempt(t);
    if (!c.ok()) throw PdFailure{};
    SymMatrix inv = c.inverse();
    double worst = 0.0;
    for (std::size_t i = 0; i < p_; ++i) {
      worst = std::max(worst, std::abs(s_(i, i) - inv(i, i)));
      for (std::size_t j = 0; j < i; ++j) {
        double r = s_(i, j) - inv(i, j);
        double th = theta_[i * p_ + j];
        double v;
        if (th != 0.0)
          v = std::isinf(rho_(i, j)) ? std::numeric_limits<double>::infinity()
                                     : std::abs(r + rho_(i, j) * (th > 0 ? 1.0 : -1.0));
        else
          v = std::isinf(rho_(i, j)) ? 0.0 : std::max(0.0, std::abs(r) - rho_(i, j));
        worst = std::max(worst, v);
      }
    }
    return worst;
  }

  std::size_t p_;
  const SymMatrix& s_;
  const PenaltyMatrix& rho_;
  const SolverConfig& cfg_;
  double jitter_;
  std::vector<double> W_, B_, theta_;
  std::vector<double> V_, q_, b_, s12_, r12_;
  std::vector<std::size_t> map_;
  bool converged_ = false;
  double kkt_ = 0.0;
};

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

void validate_inputs(const SymMatrix& s, const PenaltyMatrix& penalty) {
  if (s.dim() != penalty.dim())
    throw dimension_mismatch("covariance and penalty dimensions differ");
  if (!s.all_finite()) throw data_error("covariance contains non-finite values");
}

void validate_config(const SolverConfig& cfg) {
  if (!(cfg.outer_tol > 0.0) || !(cfg.inner_tol > 0.0) || cfg.max_outer < 1 ||
      cfg.max_inner < 1 || !(cfg.diag_jitter >= 0.0) || !(cfg.kkt_target > 0.0))
    throw data_error("invalid solver configuration");
}

bool penalty_all_zero(const PenaltyMatrix& rho) {
  for (std::size_t i = 0; i < rho.dim(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (rho(i, j) != 0.0) return false;
  return true;
}

// One full solve at a fixed jitter; throws PdFailure when a Cholesky or a
// diagonal recovery fails.
FitResult solve_at_jitter(const SymMatrix& s, const PenaltyMatrix& penalty,
                          const SolverConfig& cfg, double jitter,
                          const WarmStart* warm, WarmStart* warm_out) {
  const std::size_t p = s.dim();
  auto blocks = cfg.screen ? block_screen(s, penalty)
                           : std::vector<std::vector<std::size_t>>{[&] {
                               std::vector<std::size_t> all(p);
                               std::iota(all.begin(), all.end(), 0);
                               return all;
                             }()};

  SymMatrix theta(p), sigma(p);
  SymMatrix warm_sigma(p);
  Matrix warm_beta(p, p);
  int iterations = 0;
  bool converged = true;

  for (const auto& comp : blocks) {
    if (comp.size() == 1) {
      std::size_t i = comp[0];
      double d = s(i, i) + jitter;
      if (!(d > 0.0)) throw data_error("covariance diagonal must be positive");
      theta.set(i, i, 1.0 / d);
      sigma.set(i, i, d);
      warm_sigma.set(i, i, d);
      continue;
    }
    const std::size_t m = comp.size();
    SymMatrix sub_s(m);
    PenaltyMatrix sub_rho(m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        sub_s.set(a, b, s(comp[a], comp[b]));
        if (a != b) sub_rho.set(a, b, penalty(comp[a], comp[b]));
      }
    WarmStart sub_warm;
    if (warm && warm->valid && warm->sigma.dim() == p) {
      sub_warm.sigma = SymMatrix(m);
      sub_warm.beta = Matrix(m, m);
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
          if (b <= a) sub_warm.sigma.set(a, b, warm->sigma(comp[a], comp[b]));
          sub_warm.beta(a, b) = warm->beta(comp[a], comp[b]);
        }
      sub_warm.valid = true;
    }
    GlassoCore core(sub_s, sub_rho, cfg, jitter);
    int sweeps = core.run(sub_warm.valid ? &sub_warm : nullptr);
    iterations = std::max(iterations, sweeps);
    converged = converged && core.converged();
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        theta.set(comp[a], comp[b], core.theta(a, b));
        sigma.set(comp[a], comp[b], core.sigma(a, b));
        warm_sigma.set(comp[a], comp[b], core.sigma(a, b));
      }
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        warm_beta(comp[a], comp[b]) = core.beta(a, b);
  }

  FitResult out;
  out.theta = std::move(theta);
  out.sigma = std::move(sigma);
  out.iterations = iterations;
  out.jitter_used = jitter;
  out.kkt_violation = kkt_residual(s, out.theta, penalty);
  out.converged = converged && out.kkt_violation <= std::max(cfg.kkt_target, kTol.kkt);
  out.objective = glasso_objective(s, out.theta, penalty);
  if (warm_out) {
    warm_out->sigma = std::move(warm_sigma);
    warm_out->beta = std::move(warm_beta);
    warm_out->valid = true;
  }
  return out;
}

}  // namespace

FitResult fit_weighted_glasso(const SymMatrix& s, const PenaltyMatrix& penalty,
                              const SolverConfig& cfg, const WarmStart* warm,
                              WarmStart* warm_out) {
  validate_inputs(s, penalty);
  validate_config(cfg);
  if (penalty_all_zero(penalty)) {
    Cholesky c = Cholesky::attempt(s);
    if (!c.ok())
      throw data_error(
          "covariance is singular and the penalty is zero; use a positive "
          "penalty or a ridge-regularized covariance");
  }
  double jitter = cfg.diag_jitter;
  bool use_warm = warm && warm->valid;
  for (int attempt = 0;; ++attempt) {
    try {
      return solve_at_jitter(s, penalty, cfg, jitter, use_warm ? warm : nullptr,
                             warm_out);
    } catch (const PdFailure&) {
      if (use_warm) {  // a stale warm start can poison the iterates: go cold
        use_warm = false;
        continue;
      }
      if (attempt >= cfg.max_jitter_retries)
        throw convergence_error("solver failed to keep the iterates positive definite");
      jitter = (jitter == 0.0) ? 1e-8 : jitter * cfg.jitter_escalation;
    }
  }
}

double kkt_residual(const SymMatrix& s, const SymMatrix& theta,
                    const PenaltyMatrix& penalty) {
  if (s.dim() != theta.dim() || s.dim() != penalty.dim())
    throw dimension_mismatch("kkt_residual: dimension mismatch");
  Cholesky c(theta);  // throws if theta is not PD
  SymMatrix inv = c.inverse();
  const std::size_t p = s.dim();
  double worst = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    worst = std::max(worst, std::abs(s(i, i) - inv(i, i)));
    for (std::size_t j = 0; j < i; ++j) {
      double r = s(i, j) - inv(i, j);
      double th = theta(i, j);
      double v;
      if (th != 0.0)
        v = penalty.infinite(i, j)
                ? std::numeric_limits<double>::infinity()
                : std::abs(r + penalty(i, j) * (th > 0 ? 1.0 : -1.0));
      else
        v = penalty.infinite(i, j) ? 0.0 : std::max(0.0, std::abs(r) - penalty(i, j));
      worst = std::max(worst, v);
    }
  }
  return worst;
}

std::vector<std::vector<std::size_t>> block_screen(const SymMatrix& s,
                                                   const PenaltyMatrix& penalty) {
  validate_inputs(s, penalty);
  const std::size_t p = s.dim();
  UnionFind uf(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(s(i, j)) > penalty(i, j)) uf.unite(i, j);
  std::vector<std::vector<std::size_t>> comps(p);
  for (std::size_t i = 0; i < p; ++i) comps[uf.find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& c : comps)
    if (!c.empty()) out.push_back(std::move(c));
  return out;
}

FitResult fit_correlation_based(const DataMatrix& data, const PenaltyMatrix& penalty,
                                const SolverConfig& cfg) {
  Correlation corr = sample_correlation(data);
  FitResult k = fit_weighted_glasso(corr.r, penalty, cfg);
  const std::size_t p = corr.r.dim();
  FitResult out = k;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double kij = k.theta(i, j);
      out.theta.set(i, j, kij == 0.0 ? 0.0 : kij / (corr.sd[i] * corr.sd[j]));
      out.sigma.set(i, j, k.sigma(i, j) * corr.sd[i] * corr.sd[j]);
    }
  return out;
}

double glasso_objective(const SymMatrix& s, const SymMatrix& theta,
                        const PenaltyMatrix& penalty) {
  Cholesky c(theta);
  const std::size_t p = s.dim();
  double tr = 0.0, pen = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    tr += s(i, i) * theta(i, i);
    for (std::size_t j = 0; j < i; ++j) {
      tr += 2.0 * s(i, j) * theta(i, j);
      double th = theta(i, j);
      if (th != 0.0) {
        if (penalty.infinite(i, j)) return -std::numeric_limits<double>::infinity();
        pen += 2.0 * penalty(i, j) * std::abs(th);  // both symmetric copies
      }
    }
  }
  return c.logdet() - tr - pen;
}

std::size_t edge_count(const SymMatrix& theta) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < theta.dim(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (is_nonzero(theta(i, j))) ++n;
  return n;
}

}  // namespace hwg
