#include <doctest.h>

#include <cmath>

#include "hwg/netgen.hpp"
#include "hwg/two_step.hpp"
#include "hwg/weights.hpp"
#include "oracles.hpp"

using namespace hwg;

namespace {

SymMatrix star(std::size_t p) {  // node 0 joined to everyone
  SymMatrix t = SymMatrix::identity(p);
  for (std::size_t j = 1; j < p; ++j) t.set(0, j, 0.3);
  return t;
}

}  // namespace

TEST_CASE("degrees") {
  CHECK(degrees(SymMatrix::identity(4)) == std::vector<std::size_t>{0, 0, 0, 0});
  CHECK(degrees(star(5)) == std::vector<std::size_t>{4, 1, 1, 1, 1});

  Rng rng(61);
  SymMatrix t = SymMatrix::identity(7);
  Adjacency a(7);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (rng.bernoulli(0.3)) {
        t.set(i, j, rng.uniform(0.1, 0.5));
        a.add_edge(i, j);
      }
  CHECK(degrees(t) == a.degree());
}

TEST_CASE("threshold rule with the strict inequality") {
  SymMatrix t = star(11);  // center degree 10, leaves 1; cutoff at 10% of 10 = 1
  HubSet h = identify_hubs_threshold(t, 10.0);
  CHECK(h.indices == std::vector<std::size_t>{0});

  HubSet none = identify_hubs_threshold(SymMatrix::identity(6), 10.0);
  CHECK(none.indices.empty());
}

TEST_CASE("k-means hub split against the exhaustive partition oracle") {
  // node 0 joined to 10 others, node 1 joined to 9 of the same, rest leaves
  SymMatrix t = SymMatrix::identity(12);
  for (std::size_t j = 1; j <= 10; ++j) t.set(0, j, 0.2);
  for (std::size_t j = 2; j <= 10; ++j) t.set(1, j, 0.2);
  auto degs = degrees(t);
  std::vector<double> x(degs.begin(), degs.end());
  auto split = oracle::best_two_partition(x);
  HubSet h = identify_hubs_kmeans(t, 7);
  std::vector<std::size_t> expect;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (split.assign[i] == 1) expect.push_back(i);
  CHECK(h.indices == expect);
  CHECK(h.indices.front() == 0);
  CHECK(h.indices.size() == 2);  // the two high-degree nodes
}

TEST_CASE("k-means: single dominant hub") {
  SymMatrix t = star(9);  // degrees (8,1,...,1)
  auto degs = degrees(t);
  std::vector<double> x(degs.begin(), degs.end());
  auto split = oracle::best_two_partition(x);
  HubSet h = identify_hubs_kmeans(t, 3);
  std::vector<std::size_t> expect;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (split.assign[i] == 1) expect.push_back(i);
  CHECK(h.indices == expect);
  CHECK(h.indices == std::vector<std::size_t>{0});
}

TEST_CASE("k-means: equal degrees give no hubs") {
  SymMatrix t = SymMatrix::identity(6);
  t.set(0, 1, 0.3);
  t.set(2, 3, 0.3);
  t.set(4, 5, 0.3);  // all degrees 1
  CHECK(identify_hubs_kmeans(t, 1).indices.empty());
  CHECK(identify_hubs_kmeans(SymMatrix::identity(4), 1).indices.empty());
}

TEST_CASE("k-means is deterministic for a fixed seed above the exact-size cutoff") {
  Rng rng(62);
  SymMatrix t = SymMatrix::identity(40);
  for (std::size_t j = 1; j < 40; ++j)
    if (rng.bernoulli(0.6)) t.set(0, j, 0.2);
  for (std::size_t i = 1; i < 40; ++i)
    for (std::size_t j = 1; j < i; ++j)
      if (rng.bernoulli(0.05)) t.set(i, j, 0.2);
  HubSet a = identify_hubs_kmeans(t, 99);
  HubSet b = identify_hubs_kmeans(t, 99);
  CHECK(a.indices == b.indices);
  CHECK(!a.indices.empty());
}

TEST_CASE("two-level penalty layout") {
  HubSet h;
  h.indices = {0};
  PenaltyMatrix w = two_step_penalty(h, 3, 0.1, 0.4, TwoStepWeightMode::flat);
  CHECK(w(0, 1) == doctest::Approx(0.1));
  CHECK(w(0, 2) == doctest::Approx(0.1));
  CHECK(w(1, 2) == doctest::Approx(0.4));
  CHECK(w(0, 0) == 0.0);

  HubSet none;
  PenaltyMatrix w2 = two_step_penalty(none, 3, 0.1, 0.4, TwoStepWeightMode::flat);
  CHECK(w2(0, 1) == doctest::Approx(0.4));
  CHECK(w2(1, 2) == doctest::Approx(0.4));
}

TEST_CASE("adaptive two-level penalty divides by the initial magnitude") {
  SymMatrix t = SymMatrix::identity(3);
  t.set(1, 2, 0.5);
  HubSet none;
  PenaltyMatrix w =
      two_step_penalty(none, 3, 0.1, 0.4, TwoStepWeightMode::adaptive, &t, 1.0);
  CHECK(w(1, 2) == doctest::Approx(0.8));  // 0.4 / 0.5
  CHECK(w.infinite(0, 1));                 // zero initial estimate
  CHECK_THROWS_AS(
      two_step_penalty(none, 3, 0.1, 0.4, TwoStepWeightMode::adaptive, nullptr, 1.0),
      data_error);
}

TEST_CASE("lambda1 = lambda2 collapses to the uniform fit") {
  Rng rng(63);
  SymMatrix s = oracle::random_spd(8, rng);
  HubSet h;
  h.indices = {1, 5};
  double lam = 0.12;
  PenaltyMatrix two = two_step_penalty(h, 8, lam, lam, TwoStepWeightMode::flat);
  WeightMatrix uni = WeightMatrix::uniform(8);
  PenaltyMatrix uniform = uni.scaled(lam);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(two(i, j) == uniform(i, j));
  FitResult a = fit_weighted_glasso(s, two);
  FitResult b = fit_weighted_glasso(s, uniform);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      CHECK(std::abs(a.theta(i, j) - b.theta(i, j)) < 1e-10);
}

TEST_CASE("raising lambda1 never adds hub-incident edges") {
  Rng rng(64);
  const std::size_t p = 12;
  SymMatrix s = oracle::random_spd(p, rng);
  HubSet h;
  h.indices = {0, 3};
  double l2 = 0.1;
  std::vector<double> l1s{0.4, 0.2, 0.1, 0.05, 0.02};
  std::vector<std::size_t> counts;
  for (double l1 : l1s) {
    FitResult fit =
        fit_weighted_glasso(s, two_step_penalty(h, p, l1, l2, TwoStepWeightMode::flat));
    std::size_t c = 0;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if ((h.contains(i) || h.contains(j)) && is_nonzero(fit.theta(i, j))) ++c;
    counts.push_back(c);
  }
  CHECK(counts.front() <= counts.back());
}

TEST_CASE("two-step stage end to end") {
  Rng rng(65);
  const std::size_t p = 12;
  // planted star covariance
  SymMatrix theta0 = SymMatrix::identity(p);
  for (std::size_t j = 1; j < p; ++j) theta0.set(0, j, 0.25);
  SymMatrix sigma0 = chol_logdet_inverse(theta0).inverse;

  SolverConfig cfg;
  FitResult first = fit_weighted_glasso(sigma0, PenaltyMatrix::uniform(p, 0.02), cfg);
  REQUIRE(first.converged);

  Grid g = Grid::log_spaced(0.3, 0.01, 5);
  TwoStepResult by_threshold =
      fit_two_step(sigma0, first, HubRule::threshold, 10.0, g, g, 200, cfg);
  TwoStepResult by_kmeans =
      fit_two_step(sigma0, first, HubRule::kmeans, 10.0, g, g, 200, cfg, nullptr, 17);
  CHECK(by_threshold.hubs.indices == std::vector<std::size_t>{0});
  CHECK(by_kmeans.hubs.indices == by_threshold.hubs.indices);

  HubSet known;
  known.indices = {0};
  TwoStepResult by_known =
      fit_two_step(sigma0, first, HubRule::known, 10.0, g, g, 200, cfg, &known);
  CHECK(by_known.fit.converged);
  CHECK(by_known.fit.kkt_violation <= 1e-4);
}

TEST_CASE("diagonal first stage degrades to the uniform background fit") {
  Rng rng(66);
  SymMatrix s = oracle::random_spd(6, rng);
  FitResult first = fit_weighted_glasso(s, PenaltyMatrix::uniform(6, 100.0));
  REQUIRE(edge_count(first.theta) == 0);
  Grid g = Grid::log_spaced(0.4, 0.04, 4);
  TwoStepResult ts = fit_two_step(s, first, HubRule::threshold, 10.0, g, g, 50);
  CHECK(ts.hubs.indices.empty());
  WeightMatrix uni = WeightMatrix::uniform(6);
  auto [fit_1d, rep] = select_lambda(s, uni, g, 50);
  CHECK(std::abs(ts.fit.objective - fit_1d.objective) < 1e-9);
}

TEST_CASE("unconverged first stage is rejected") {
  Rng rng(67);
  SymMatrix s = oracle::random_spd(4, rng);
  FitResult fake = fit_weighted_glasso(s, PenaltyMatrix::uniform(4, 0.1));
  fake.converged = false;
  Grid g = Grid::log_spaced(0.2, 0.02, 3);
  CHECK_THROWS_AS(fit_two_step(s, fake, HubRule::threshold, 10.0, g, g, 50),
                  data_error);
}

TEST_CASE("threshold rule recovers the planted hubs on the truth") {
  // planted hubs always clear the 10% cutoff; a non-hub exceeds it only via
  // ~3 extra background edges (prob ~0.0075/node), so exact set equality
  // happens in about e^{-0.36} ~ 70% of graphs
  int exact = 0, contains = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    NetworkSpec net = generate_network(Mechanism::i, 50, seed);
    HubSet est = identify_hubs_threshold(net.theta0, 10.0);
    bool has_all = true;
    for (std::size_t h : net.hubs.indices)
      if (!est.contains(h)) has_all = false;
    if (has_all) ++contains;
    if (est.indices == net.hubs.indices) ++exact;
  }
  CHECK(contains == 100);
  CHECK(exact >= 60);
}

TEST_CASE("adaptive second stage honors the initial estimate's exclusions") {
  Rng rng(68);
  SymMatrix s = oracle::random_spd(8, rng);
  SolverConfig cfg;
  FitResult first = fit_weighted_glasso(s, PenaltyMatrix::uniform(8, 0.05), cfg);
  REQUIRE(first.converged);
  SymMatrix tilde = first.theta;  // sparse initial estimate with exact zeros
  Grid g = Grid::log_spaced(0.3, 0.03, 4);
  TwoStepResult ts =
      fit_two_step(s, first, HubRule::threshold, 10.0, g, g, 60, cfg, nullptr, 0,
                   TwoStepWeightMode::adaptive, &tilde, 1.0);
  CHECK(ts.fit.converged);
  CHECK(ts.fit.kkt_violation <= 1e-4);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (tilde(i, j) == 0.0) CHECK(ts.fit.theta(i, j) == 0.0);
}
