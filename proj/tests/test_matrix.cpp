#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "hwg/linalg.hpp"
#include "hwg/matrix.hpp"
#include "hwg/rng.hpp"
#include "oracles.hpp"

using namespace hwg;

namespace {

DataMatrix make_data(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t n = rows.size(), p = rows.begin()->size();
  Matrix m(n, p);
  std::size_t i = 0;
  for (auto& r : rows) {
    std::size_t j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return DataMatrix(std::move(m));
}

}  // namespace

TEST_CASE("uncentered covariance, single row") {
  DataMatrix d = make_data({{1.0, 0.0}});
  SymMatrix s = sample_covariance(d, false);
  CHECK(s(0, 0) == 1.0);
  CHECK(s(0, 1) == 0.0);
  CHECK(s(1, 1) == 0.0);
}

TEST_CASE("uncentered covariance, symmetric two rows") {
  DataMatrix d = make_data({{1.0, 1.0}, {-1.0, -1.0}});
  SymMatrix s = sample_covariance(d, false);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(s(i, j) == doctest::Approx(1.0));
}

TEST_CASE("centered covariance matches textbook oracle") {
  Rng rng(11);
  DataMatrix d{oracle::random_data(5, 3, rng)};
  SymMatrix s = sample_covariance(d, true);
  Matrix ref = oracle::covariance_textbook(d.values, true);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(s(i, j) - ref(i, j)) < 1e-12);
}

TEST_CASE("covariance invariant to row permutation") {
  Rng rng(12);
  Matrix x = oracle::random_data(8, 4, rng);
  Matrix perm(8, 4);
  std::size_t order[8] = {5, 2, 7, 0, 3, 6, 1, 4};
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 4; ++j) perm(i, j) = x(order[i], j);
  SymMatrix a = sample_covariance(DataMatrix(x), true);
  SymMatrix b = sample_covariance(DataMatrix(perm), true);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(a(i, j) == doctest::Approx(b(i, j)));
}

TEST_CASE("correlation basics") {
  DataMatrix d = make_data({{1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}});
  auto [r, sd] = sample_correlation(d);
  CHECK(r(0, 0) == 1.0);
  CHECK(r(0, 1) == doctest::Approx(1.0));

  // scaling a column leaves the correlation unchanged
  DataMatrix scaled = make_data({{1.0, 20.0}, {2.0, 40.0}, {3.0, 60.0}});
  auto [r2, sd2] = sample_correlation(scaled);
  CHECK(r2(0, 1) == doctest::Approx(r(0, 1)));
  CHECK(sd2[1] == doctest::Approx(10.0 * sd[1]));
}

TEST_CASE("correlation matches elementwise oracle") {
  Rng rng(13);
  DataMatrix d{oracle::random_data(10, 4, rng)};
  auto [r, sd] = sample_correlation(d);
  Matrix cov = oracle::covariance_textbook(d.values, true);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::abs(r(i, j) - cov(i, j) / (sd[i] * sd[j])) < 1e-12);
}

TEST_CASE("constant column is rejected by name") {
  DataMatrix d(make_data({{1.0, 5.0}, {2.0, 5.0}}).values, {"a", "flat"});
  CHECK_THROWS_WITH_AS(sample_correlation(d),
                       doctest::Contains("flat"), data_error);
}

TEST_CASE("cholesky logdet and inverse") {
  SymMatrix eye = SymMatrix::identity(3);
  auto [logdet, inv] = chol_logdet_inverse(eye);
  CHECK(logdet == doctest::Approx(0.0));
  CHECK(inv == eye);

  SymMatrix d2(2);
  d2.set(0, 0, 2.0);
  d2.set(1, 1, 4.0);
  auto r = chol_logdet_inverse(d2);
  CHECK(r.logdet == doctest::Approx(std::log(8.0)));
  CHECK(r.inverse(0, 0) == doctest::Approx(0.5));
  CHECK(r.inverse(1, 1) == doctest::Approx(0.25));
}

TEST_CASE("inverse residual on a random PD matrix") {
  Rng rng(14);
  SymMatrix s = oracle::random_spd(6, rng);
  auto [logdet, inv] = chol_logdet_inverse(s);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 6; ++k) acc += s(i, k) * inv(k, j);
      CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
  // logdet(m) + logdet(m^{-1}) = 0
  CHECK(std::abs(logdet + chol_logdet_inverse(inv).logdet) < 1e-9);
}

TEST_CASE("non-PD input raises the dedicated error") {
  SymMatrix s(2);
  s.set(0, 0, 1.0);
  s.set(1, 1, -1.0);
  CHECK_THROWS_AS(chol_logdet_inverse(s), not_positive_definite);
}

TEST_CASE("eigen extremes on known matrices") {
  SymMatrix d(2);
  d.set(0, 0, 1.0);
  d.set(1, 1, 5.0);
  auto ex = eigen_extremes(d);
  CHECK(ex.min == doctest::Approx(1.0));
  CHECK(ex.max == doctest::Approx(5.0));

  SymMatrix f(2);
  f.set(0, 1, 1.0);
  auto ex2 = eigen_extremes(f);
  CHECK(ex2.min == doctest::Approx(-1.0));
  CHECK(ex2.max == doctest::Approx(1.0));
}

TEST_CASE("eigen extremes match the Jacobi oracle on random symmetric input") {
  Rng rng(15);
  const std::size_t p = 8;
  SymMatrix s(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) s.set(i, j, rng.normal());
  auto ex = eigen_extremes(s);
  std::vector<double> a(s.data(), s.data() + p * p), d(p), v(p * p);
  oracle::jacobi_eigen(p, a.data(), d.data(), v.data());
  double lo = *std::min_element(d.begin(), d.end());
  double hi = *std::max_element(d.begin(), d.end());
  CHECK(std::abs(ex.min - lo) < 1e-6);
  CHECK(std::abs(ex.max - hi) < 1e-6);
}

TEST_CASE("eigen extremes shift identity") {
  Rng rng(16);
  SymMatrix s = oracle::random_spd(5, rng);
  auto base = eigen_extremes(s);
  double c = 2.75;
  SymMatrix shifted = s;
  for (std::size_t i = 0; i < 5; ++i) shifted.set(i, i, s(i, i) + c);
  auto moved = eigen_extremes(shifted);
  CHECK(std::abs(moved.min - (base.min + c)) < 1e-8);
  CHECK(std::abs(moved.max - (base.max + c)) < 1e-8);
}

TEST_CASE("norms of a difference") {
  SymMatrix a(2), b(2);
  a.set(0, 0, 3.0);
  a.set(1, 1, 4.0);
  auto n = matrix_norms(a, b);
  CHECK(n.frobenius_sq == doctest::Approx(25.0));
  CHECK(n.operator_norm == doctest::Approx(4.0));
  CHECK(n.offdiag_l1 == doctest::Approx(0.0));

  auto z = matrix_norms(a, a);
  CHECK(z.frobenius_sq == 0.0);
  CHECK(z.operator_norm == doctest::Approx(0.0));
}

TEST_CASE("frobenius matches elementwise oracle; norm sandwich") {
  Rng rng(17);
  const std::size_t p = 5;
  SymMatrix a(p), b(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      a.set(i, j, rng.normal());
      b.set(i, j, rng.normal());
    }
  auto n = matrix_norms(a, b);
  double fro = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      double d = a(i, j) - b(i, j);
      fro += d * d;
    }
  CHECK(std::abs(n.frobenius_sq - fro) < 1e-12);
  double fnorm = std::sqrt(n.frobenius_sq);
  CHECK(n.operator_norm <= fnorm + 1e-12);
  CHECK(fnorm <= std::sqrt(static_cast<double>(p)) * n.operator_norm + 1e-12);
}

TEST_CASE("csv round trip is exact") {
  Rng rng(18);
  SymMatrix s = oracle::random_spd(4, rng);
  auto path = std::filesystem::temp_directory_path() / "hwg_test_matrix.csv";
  write_sym_csv(path.string(), s);
  SymMatrix back = read_sym_csv(path.string());
  CHECK(back == s);
  std::filesystem::remove(path);
}

TEST_CASE("csv validation") {
  auto dir = std::filesystem::temp_directory_path();
  auto bad = dir / "hwg_bad.csv";
  {
    std::FILE* f = std::fopen(bad.c_str(), "w");
    std::fputs("1,2\n3,nan\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_matrix_csv(bad.string()), data_error);
  std::filesystem::remove(bad);

  auto asym = dir / "hwg_asym.csv";
  {
    std::FILE* f = std::fopen(asym.c_str(), "w");
    std::fputs("1,2\n3,4\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_sym_csv(asym.string()), data_error);
  std::filesystem::remove(asym);
}

TEST_CASE("data matrix validation") {
  Matrix one_col(3, 1);
  CHECK_THROWS_AS(DataMatrix{one_col}, data_error);
  Matrix with_nan(2, 2);
  with_nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(DataMatrix{with_nan}, data_error);
}
