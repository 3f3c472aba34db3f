#include "hwg/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace hwg {

Cholesky::Cholesky(const SymMatrix& a) {
  factor(a);
  if (!ok_) throw not_positive_definite("matrix is not positive definite");
}

Cholesky Cholesky::attempt(const SymMatrix& a) {
  Cholesky c;
  c.factor(a);
  return c;
}

void Cholesky::factor(const SymMatrix& a) {
  p_ = a.dim();
  l_.assign(p_ * p_, 0.0);
  if (!a.all_finite()) {
    ok_ = false;
    return;
  }
  for (std::size_t j = 0; j < p_; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l_[j * p_ + k] * l_[j * p_ + k];
    if (!(d > kTol.pd_check)) {
      ok_ = false;
      return;
    }
    double ljj = std::sqrt(d);
    l_[j * p_ + j] = ljj;
    for (std::size_t i = j + 1; i < p_; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l_[i * p_ + k] * l_[j * p_ + k];
      l_[i * p_ + j] = s / ljj;
    }
  }
  ok_ = true;
}

double Cholesky::logdet() const {
  double s = 0.0;
  for (std::size_t i = 0; i < p_; ++i) s += std::log(l_[i * p_ + i]);
  return 2.0 * s;
}

void Cholesky::solve_in_place(std::vector<double>& b) const {
  // forward: L y = b
  for (std::size_t i = 0; i < p_; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l_[i * p_ + k] * b[k];
    b[i] = s / l_[i * p_ + i];
  }
  // back: L' x = y
  for (std::size_t ii = p_; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < p_; ++k) s -= l_[k * p_ + ii] * b[k];
    b[ii] = s / l_[ii * p_ + ii];
  }
}

SymMatrix Cholesky::inverse() const {
  SymMatrix inv(p_);
  std::vector<double> col(p_);
  for (std::size_t j = 0; j < p_; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = 1.0;
    solve_in_place(col);
    for (std::size_t i = j; i < p_; ++i) inv.set(i, j, col[i]);
  }
  return inv;
}

LogDetInverse chol_logdet_inverse(const SymMatrix& m) {
  Cholesky c(m);
  return {c.logdet(), c.inverse()};
}

namespace {

// Householder reduction of a symmetric matrix to tridiagonal form (d, e)
// accumulating the transformation in z; followed by QL with implicit shifts.
// Classic EISPACK tred2/tql2 in double precision.
void tred2(std::size_t n, std::vector<double>& z, std::vector<double>& d,
           std::vector<double>& e, bool want_vectors) {
  for (std::size_t ii = n - 1; ii > 0; --ii) {
    std::size_t i = ii;
    std::size_t l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(z[i * n + k]);
      if (scale == 0.0) {
        e[i] = z[i * n + l];
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          z[i * n + k] /= scale;
          h += z[i * n + k] * z[i * n + k];
        }
        double f = z[i * n + l];
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        z[i * n + l] = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          if (want_vectors) z[j * n + i] = z[i * n + j] / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += z[j * n + k] * z[i * n + k];
          for (std::size_t k = j + 1; k <= l; ++k) g += z[k * n + j] * z[i * n + k];
          e[j] = g / h;
          f += e[j] * z[i * n + j];
        }
        double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = z[i * n + j];
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k)
            z[j * n + k] -= f * e[k] + g * z[i * n + k];
        }
      }
    } else {
      e[i] = z[i * n + l];
    }
    d[i] = h;
  }
  if (want_vectors) d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (want_vectors) {
      if (d[i] != 0.0) {
        std::size_t l = i;  // columns 0..i-1
        for (std::size_t j = 0; j < l; ++j) {
          double g = 0.0;
          for (std::size_t k = 0; k < l; ++k) g += z[i * n + k] * z[k * n + j];
          for (std::size_t k = 0; k < l; ++k) z[k * n + j] -= g * z[k * n + i];
        }
      }
      d[i] = z[i * n + i];
      z[i * n + i] = 1.0;
      for (std::size_t j = 0; j < i; ++j) {
        z[j * n + i] = 0.0;
        z[i * n + j] = 0.0;
      }
    } else {
      d[i] = z[i * n + i];
    }
  }
}

double hypot2(double a, double b) { return std::hypot(a, b); }

void tql2(std::size_t n, std::vector<double>& d, std::vector<double>& e,
          std::vector<double>& z, bool want_vectors) {
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0, tst1 = 0.0;
  const double eps = std::pow(2.0, -52.0);
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        ++iter;
        // implicit shift from the 2x2 trailing block
        double g = d[l];
        double pp = (d[l + 1] - g) / (2.0 * e[l]);
        double r = hypot2(pp, 1.0);
        if (pp < 0) r = -r;
        d[l] = e[l] / (pp + r);
        d[l + 1] = e[l] * (pp + r);
        double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        pp = d[m];
        double c = 1.0, c2 = c, c3 = c;
        double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          std::size_t i = ii;
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * pp;
          r = hypot2(pp, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = pp / r;
          pp = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          if (want_vectors) {
            for (std::size_t k = 0; k < n; ++k) {
              h = z[k * n + i + 1];
              z[k * n + i + 1] = s * z[k * n + i] + c * h;
              z[k * n + i] = c * z[k * n + i] - s * h;
            }
          }
        }
        pp = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * pp;
        d[l] = c * pp;
      } while (std::abs(e[l]) > eps * tst1 && iter < 50);
    }
    d[l] += f;
    e[l] = 0.0;
  }

  // ascending order
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t k = i;
    double pp = d[i];
    for (std::size_t j = i + 1; j < n; ++j)
      if (d[j] < pp) {
        k = j;
        pp = d[j];
      }
    if (k != i) {
      d[k] = d[i];
      d[i] = pp;
      if (want_vectors)
        for (std::size_t j = 0; j < n; ++j) std::swap(z[j * n + i], z[j * n + k]);
    }
  }
}

}  // namespace

SymEigen sym_eigen(const SymMatrix& a, bool want_vectors) {
  if (!a.all_finite()) throw data_error("eigendecomposition of non-finite matrix");
  const std::size_t n = a.dim();
  SymEigen out;
  out.values.assign(n, 0.0);
  if (n == 0) return out;
  std::vector<double> z(a.data(), a.data() + n * n);
  std::vector<double> e(n, 0.0);
  if (n == 1) {
    out.values[0] = z[0];
    if (want_vectors) {
      out.vectors = Matrix(1, 1);
      out.vectors(0, 0) = 1.0;
    }
    return out;
  }
  tred2(n, z, out.values, e, want_vectors);
  tql2(n, out.values, e, z, want_vectors);
  if (want_vectors) {
    out.vectors = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.vectors(i, j) = z[i * n + j];
  }
  return out;
}

EigenExtremes eigen_extremes(const SymMatrix& m) {
  SymEigen eg = sym_eigen(m, false);
  return {eg.values.front(), eg.values.back()};
}

DiffNorms matrix_norms(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw dimension_mismatch("matrix_norms: dimension mismatch");
  const std::size_t p = a.dim();
  SymMatrix d(p);
  double fro = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double x = a(i, j) - b(i, j);
      d.set(i, j, x);
      fro += (i == j) ? x * x : 2.0 * x * x;
      if (i != j) l1 += 2.0 * std::abs(x);
    }
  EigenExtremes ex = p ? eigen_extremes(d) : EigenExtremes{0.0, 0.0};
  double op = std::max(std::abs(ex.min), std::abs(ex.max));
  return {fro, op, l1};
}

}  // namespace hwg
