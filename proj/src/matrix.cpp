#include "hwg/matrix.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hwg {

bool Matrix::all_finite() const {
  for (double x : v_)
    if (!std::isfinite(x)) return false;
  return true;
}

DataMatrix::DataMatrix(Matrix m, std::vector<std::string> names)
    : values(std::move(m)), labels(std::move(names)) {
  if (values.rows() < 1 || values.cols() < 2)
    throw data_error("data matrix needs at least 1 row and 2 columns");
  if (!values.all_finite()) throw data_error("data matrix contains non-finite values");
  if (!labels.empty() && labels.size() != values.cols())
    throw data_error("label count does not match column count");
}

SymMatrix SymMatrix::identity(std::size_t p) {
  SymMatrix m(p);
  for (std::size_t i = 0; i < p; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::from_full(const Matrix& m) {
  if (m.rows() != m.cols()) throw dimension_mismatch("matrix is not square");
  SymMatrix s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      if (m(i, j) != m(j, i))
        throw data_error("matrix is not symmetric at (" + std::to_string(i + 1) + "," +
                         std::to_string(j + 1) + ")");
      s.set(i, j, m(i, j));
    }
  return s;
}

bool SymMatrix::all_finite() const {
  for (double x : v_)
    if (!std::isfinite(x)) return false;
  return true;
}

SymMatrix sample_covariance(const DataMatrix& data, bool center) {
  const std::size_t n = data.n(), p = data.p();
  if (center && n < 2) throw data_error("centered covariance needs at least 2 rows");
  std::vector<double> mean(p, 0.0);
  if (center) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j) mean[j] += data.values(i, j);
    for (std::size_t j = 0; j < p; ++j) mean[j] /= static_cast<double>(n);
  }
  SymMatrix s(p);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        acc += (data.values(i, a) - mean[a]) * (data.values(i, b) - mean[b]);
      s.set(a, b, acc / static_cast<double>(n));
    }
  return s;
}

Correlation sample_correlation(const DataMatrix& data) {
  if (data.n() < 2) throw data_error("correlation needs at least 2 rows");
  const std::size_t p = data.p();
  SymMatrix cov = sample_covariance(data, true);
  std::vector<double> sd(p);
  for (std::size_t j = 0; j < p; ++j) {
    sd[j] = std::sqrt(cov(j, j));
    if (!(sd[j] > 0.0)) {
      std::string name = data.labels.empty() ? ("column " + std::to_string(j + 1))
                                             : ("column '" + data.labels[j] + "'");
      throw data_error("constant " + name + ": standard deviation is zero");
    }
  }
  SymMatrix r(p);
  for (std::size_t a = 0; a < p; ++a) {
    r.set(a, a, 1.0);
    for (std::size_t b = 0; b < a; ++b) r.set(a, b, cov(a, b) / (sd[a] * sd[b]));
  }
  return {std::move(r), std::move(sd)};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

double parse_cell(const std::string& cell, const std::string& path, bool allow_inf) {
  const char* s = cell.c_str();
  char* end = nullptr;
  errno = 0;
  double x = std::strtod(s, &end);
  while (end && *end == ' ') ++end;
  if (end == s || (end && *end != '\0'))
    throw data_error(path + ": cannot parse value '" + cell + "'");
  if (!std::isfinite(x) && !(allow_inf && std::isinf(x)))
    throw data_error(path + ": non-finite value '" + cell + "'");
  return x;
}

bool numeric_cell(const std::string& cell, bool allow_inf) {
  const char* s = cell.c_str();
  char* end = nullptr;
  double x = std::strtod(s, &end);
  while (end && *end == ' ') ++end;
  if (end == s || (end && *end != '\0')) return false;
  return std::isfinite(x) || (allow_inf && std::isinf(x));
}

std::vector<std::string> split_csv_line(const std::string& line) {
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
  for (auto& s : cells) {
    std::size_t a = s.find_first_not_of(" \t");
    std::size_t b = s.find_last_not_of(" \t");
    s = (a == std::string::npos) ? "" : s.substr(a, b - a + 1);
  }
  return cells;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path, std::vector<std::string>* header,
                       bool allow_inf) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (first) {
      first = false;
      bool all_numeric = true;
      for (const auto& c : cells)
        if (!numeric_cell(c, allow_inf)) all_numeric = false;
      if (!all_numeric) {  // header row
        if (header) *header = cells;
        cols = cells.size();
        continue;
      }
      cols = cells.size();
    }
    if (cells.size() != cols)
      throw data_error(path + ": ragged row with " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(cols));
    std::vector<double> row(cols);
    for (std::size_t j = 0; j < cols; ++j) row[j] = parse_cell(cells[j], path, allow_inf);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw data_error(path + ": no data rows");
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j)
      out << (j ? "," : "") << header[j];
    out << '\n';
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j)
      out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
  if (!out) throw data_error("write failed for '" + path + "'");
}

SymMatrix read_sym_csv(const std::string& path, bool allow_inf) {
  Matrix m = read_matrix_csv(path, nullptr, allow_inf);
  try {
    return SymMatrix::from_full(m);
  } catch (const data_error& e) {
    throw data_error(path + ": " + e.what());
  }
}

void write_sym_csv(const std::string& path, const SymMatrix& m,
                   const std::vector<std::string>& header) {
  Matrix full(m.dim(), m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) full(i, j) = m(i, j);
  write_matrix_csv(path, full, header);
}

}  // namespace hwg
