#include "helmkrylov/linalg/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace hk {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path + "' for reading");
  return is;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("malformed number '" + s + "' in " + context);
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_matrix_market(std::ostream& os, const SparseMatrix& a) {
  os << "%%MatrixMarket matrix coordinate complex general\n";
  os << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  const auto& ro = a.row_offsets();
  const auto& ci = a.col_indices();
  const auto& va = a.values();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index p = ro[i]; p < ro[i + 1]; ++p) {
      os << i + 1 << ' ' << ci[p] + 1 << ' ' << format_double(va[p].real()) << ' '
         << format_double(va[p].imag()) << '\n';
    }
  }
}

void write_matrix_market(const std::string& path, const SparseMatrix& a) {
  auto os = open_out(path);
  write_matrix_market(os, a);
}

SparseMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("Matrix Market: empty input");
  std::istringstream header(lower(line));
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix" || format != "coordinate") {
    throw Error("Matrix Market: only 'matrix coordinate' files are supported");
  }
  const bool is_complex = field == "complex";
  if (!is_complex && field != "real" && field != "integer" && field != "double") {
    throw Error("Matrix Market: unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian" &&
      symmetry != "skew-symmetric") {
    throw Error("Matrix Market: unsupported symmetry '" + symmetry + "'");
  }
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream dims(line);
  Index nr = 0, nc = 0, nz = 0;
  if (!(dims >> nr >> nc >> nz)) throw Error("Matrix Market: bad size line");

  std::vector<Triplet> trips;
  trips.reserve(symmetry == "general" ? nz : 2 * nz);
  for (Index e = 0; e < nz; ++e) {
    if (!std::getline(is, line)) throw Error("Matrix Market: truncated entry list");
    if (line.empty() || line[0] == '%') {
      --e;
      continue;
    }
    std::istringstream es(line);
    Index i = 0, j = 0;
    double re = 0.0, im = 0.0;
    if (!(es >> i >> j >> re) || (is_complex && !(es >> im))) {
      throw Error("Matrix Market: malformed entry '" + line + "'");
    }
    if (i < 1 || j < 1 || i > nr || j > nc) {
      throw Error("Matrix Market: index out of range in '" + line + "'");
    }
    const cplx v(re, im);
    trips.push_back({i - 1, j - 1, v});
    if (i != j) {
      if (symmetry == "symmetric") trips.push_back({j - 1, i - 1, v});
      if (symmetry == "hermitian") trips.push_back({j - 1, i - 1, std::conj(v)});
      if (symmetry == "skew-symmetric") trips.push_back({j - 1, i - 1, -v});
    }
  }
  return SparseMatrix::from_triplets(nr, nc, std::move(trips));
}

SparseMatrix read_matrix_market(const std::string& path) {
  auto is = open_in(path);
  return read_matrix_market(is);
}

void write_matrix_market_dense(const std::string& path, const DenseMatrix& a) {
  auto os = open_out(path);
  os << "%%MatrixMarket matrix array complex general\n";
  os << a.rows() << ' ' << a.cols() << '\n';
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      os << format_double(a(i, j).real()) << ' ' << format_double(a(i, j).imag()) << '\n';
    }
  }
}

void write_vector_csv(const std::string& path, const Vec& v) {
  auto os = open_out(path);
  os << "re,im\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    os << format_double(v[i].real()) << ',' << format_double(v[i].imag()) << '\n';
  }
}

Vec read_vector_csv(const std::string& path) {
  auto is = open_in(path);
  std::string line;
  std::vector<cplx> vals;
  Index lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && lower(line).rfind("re", 0) == 0) continue;
    const auto cells = split_csv(line);
    const std::string ctx = path + ":" + std::to_string(lineno);
    if (cells.size() != 2) throw Error("expected two columns at " + ctx);
    vals.emplace_back(parse_double(cells[0], ctx), parse_double(cells[1], ctx));
  }
  Vec v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

void write_matrix_csv(const std::string& path, const DenseMatrix& a) {
  auto os = open_out(path);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j > 0) os << ',';
      os << format_double(a(i, j).real()) << ',' << format_double(a(i, j).imag());
    }
    os << '\n';
  }
}

DenseMatrix read_matrix_csv(const std::string& path) {
  auto is = open_in(path);
  std::string line;
  std::vector<std::vector<cplx>> rows;
  Index lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    const std::string ctx = path + ":" + std::to_string(lineno);
    if (cells.size() % 2 != 0) throw Error("odd number of columns at " + ctx);
    std::vector<cplx> row;
    for (std::size_t c = 0; c < cells.size(); c += 2) {
      row.emplace_back(parse_double(cells[c], ctx), parse_double(cells[c + 1], ctx));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error("ragged row at " + ctx);
    }
    rows.push_back(std::move(row));
  }
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index nc = nr == 0 ? 0 : static_cast<Eigen::Index>(rows.front().size());
  DenseMatrix a(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nc; ++j) {
      a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return a;
}

}  // namespace hk
