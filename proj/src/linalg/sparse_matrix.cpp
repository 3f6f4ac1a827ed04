#include "helmkrylov/linalg/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hk {

SparseMatrix::SparseMatrix(Index nrows, Index ncols,
                           std::vector<Index> row_offsets,
                           std::vector<Index> col_indices,
                           std::vector<cplx> values)
    : nrows_(nrows),
      ncols_(ncols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (auto msg = validate(); !msg.empty()) {
    throw DimensionError("invalid CSR matrix: " + msg);
  }
}

std::string SparseMatrix::validate() const {
  std::ostringstream os;
  if (row_offsets_.size() != nrows_ + 1) {
    os << "row_offsets has " << row_offsets_.size() << " entries, expected "
       << nrows_ + 1;
    return os.str();
  }
  if (row_offsets_.front() != 0) return "row_offsets[0] != 0";
  if (row_offsets_.back() != values_.size()) {
    return "last row offset differs from the number of stored values";
  }
  if (col_indices_.size() != values_.size()) {
    return "col_indices and values differ in length";
  }
  for (Index i = 0; i < nrows_; ++i) {
    if (row_offsets_[i + 1] < row_offsets_[i]) {
      os << "row_offsets decrease at row " << i;
      return os.str();
    }
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      if (col_indices_[p] >= ncols_) {
        os << "column index out of range in row " << i;
        return os.str();
      }
      if (p > row_offsets_[i] && col_indices_[p] <= col_indices_[p - 1]) {
        os << "column indices not strictly increasing in row " << i;
        return os.str();
      }
    }
  }
  return {};
}

SparseMatrix SparseMatrix::from_triplets(Index nrows, Index ncols,
                                         std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= nrows || t.col >= ncols) {
      throw DimensionError("triplet index out of range");
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  std::vector<Index> offsets(nrows + 1, 0);
  std::vector<Index> cols;
  std::vector<cplx> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  for (Index p = 0; p < triplets.size();) {
    const Index r = triplets[p].row;
    const Index c = triplets[p].col;
    cplx acc = 0.0;
    while (p < triplets.size() && triplets[p].row == r &&
           triplets[p].col == c) {
      acc += triplets[p].value;
      ++p;
    }
    cols.push_back(c);
    vals.push_back(acc);
    ++offsets[r + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(nrows, ncols, std::move(offsets), std::move(cols),
                      std::move(vals));
}

SparseMatrix SparseMatrix::identity(Index n) {
  return diagonal(Vec::Ones(static_cast<Eigen::Index>(n)));
}

SparseMatrix SparseMatrix::diagonal(const Vec& d) {
  const Index n = static_cast<Index>(d.size());
  std::vector<Index> offsets(n + 1);
  std::vector<Index> cols(n);
  std::vector<cplx> vals(n);
  for (Index i = 0; i < n; ++i) {
    offsets[i + 1] = i + 1;
    cols[i] = i;
    vals[i] = d[static_cast<Eigen::Index>(i)];
  }
  return SparseMatrix(n, n, std::move(offsets), std::move(cols),
                      std::move(vals));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& a, double drop_tol) {
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (std::abs(a(i, j)) > drop_tol) {
        t.push_back({static_cast<Index>(i), static_cast<Index>(j), a(i, j)});
      }
    }
  }
  return from_triplets(static_cast<Index>(a.rows()),
                       static_cast<Index>(a.cols()), std::move(t));
}

SparseMatrix SparseMatrix::from_eigen(
    const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& a) {
  std::vector<Index> offsets(static_cast<Index>(a.rows()) + 1, 0);
  std::vector<Index> cols;
  std::vector<cplx> vals;
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(a, i);
         it; ++it) {
      cols.push_back(static_cast<Index>(it.col()));
      vals.push_back(it.value());
    }
    offsets[static_cast<Index>(i) + 1] = cols.size();
  }
  return SparseMatrix(static_cast<Index>(a.rows()),
                      static_cast<Index>(a.cols()), std::move(offsets),
                      std::move(cols), std::move(vals));
}

cplx SparseMatrix::at(Index i, Index j) const {
  if (i >= nrows_ || j >= ncols_) throw DimensionError("entry out of range");
  const auto first = col_indices_.begin() + static_cast<long>(row_offsets_[i]);
  const auto last = col_indices_.begin() + static_cast<long>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it != last && *it == j) {
    return values_[static_cast<Index>(it - col_indices_.begin())];
  }
  return 0.0;
}

bool SparseMatrix::has_entry(Index i, Index j) const {
  if (i >= nrows_ || j >= ncols_) return false;
  const auto first = col_indices_.begin() + static_cast<long>(row_offsets_[i]);
  const auto last = col_indices_.begin() + static_cast<long>(row_offsets_[i + 1]);
  return std::binary_search(first, last, j);
}

void SparseMatrix::multiply(const Vec& x, Vec& y) const {
  require_dims(static_cast<Index>(x.size()) == ncols_, "spmv: A.cols != len(x)");
  y.resize(static_cast<Eigen::Index>(nrows_));
  for (Index i = 0; i < nrows_; ++i) {
    cplx acc = 0.0;
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      acc += values_[p] * x[static_cast<Eigen::Index>(col_indices_[p])];
    }
    y[static_cast<Eigen::Index>(i)] = acc;
  }
}

Vec SparseMatrix::multiply(const Vec& x) const {
  Vec y;
  multiply(x, y);
  return y;
}

Vec SparseMatrix::multiply_adjoint(const Vec& x) const {
  require_dims(static_cast<Index>(x.size()) == nrows_,
               "adjoint spmv: A.rows != len(x)");
  Vec y = Vec::Zero(static_cast<Eigen::Index>(ncols_));
  for (Index i = 0; i < nrows_; ++i) {
    const cplx xi = x[static_cast<Eigen::Index>(i)];
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      y[static_cast<Eigen::Index>(col_indices_[p])] += std::conj(values_[p]) * xi;
    }
  }
  return y;
}

SparseMatrix SparseMatrix::compress(double drop_tol) const {
  std::vector<Index> offsets(nrows_ + 1, 0);
  std::vector<Index> cols;
  std::vector<cplx> vals;
  for (Index i = 0; i < nrows_; ++i) {
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      if (std::abs(values_[p]) > drop_tol) {
        cols.push_back(col_indices_[p]);
        vals.push_back(values_[p]);
      }
    }
    offsets[i + 1] = cols.size();
  }
  return SparseMatrix(nrows_, ncols_, std::move(offsets), std::move(cols),
                      std::move(vals));
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Index> offsets(ncols_ + 1, 0);
  for (Index c : col_indices_) ++offsets[c + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<Index> next(offsets.begin(), offsets.end() - 1);
  std::vector<Index> cols(values_.size());
  std::vector<cplx> vals(values_.size());
  for (Index i = 0; i < nrows_; ++i) {
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      const Index dst = next[col_indices_[p]]++;
      cols[dst] = i;
      vals[dst] = values_[p];
    }
  }
  return SparseMatrix(ncols_, nrows_, std::move(offsets), std::move(cols),
                      std::move(vals));
}

SparseMatrix SparseMatrix::adjoint() const {
  SparseMatrix t = transpose();
  for (auto& v : t.values_) v = std::conj(v);
  return t;
}

SparseMatrix SparseMatrix::scaled(cplx alpha) const {
  SparseMatrix s = *this;
  for (auto& v : s.values_) v *= alpha;
  return s;
}

SparseMatrix SparseMatrix::select(const std::vector<Index>& rows,
                                  const std::vector<Index>& cols) const {
  constexpr Index kNone = static_cast<Index>(-1);
  std::vector<Index> col_map(ncols_, kNone);
  for (Index j = 0; j < cols.size(); ++j) {
    if (cols[j] >= ncols_) throw DimensionError("select: column out of range");
    col_map[cols[j]] = j;
  }
  std::vector<Triplet> t;
  for (Index r = 0; r < rows.size(); ++r) {
    const Index i = rows[r];
    if (i >= nrows_) throw DimensionError("select: row out of range");
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      const Index c = col_map[col_indices_[p]];
      if (c != kNone) t.push_back({r, c, values_[p]});
    }
  }
  return from_triplets(rows.size(), cols.size(), std::move(t));
}

Vec SparseMatrix::diagonal_values() const {
  const Index n = std::min(nrows_, ncols_);
  Vec d(static_cast<Eigen::Index>(n));
  for (Index i = 0; i < n; ++i) d[static_cast<Eigen::Index>(i)] = at(i, i);
  return d;
}

Vec SparseMatrix::row_sums() const {
  Vec s = Vec::Zero(static_cast<Eigen::Index>(nrows_));
  for (Index i = 0; i < nrows_; ++i) {
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      s[static_cast<Eigen::Index>(i)] += values_[p];
    }
  }
  return s;
}

cplx SparseMatrix::sum() const {
  cplx s = 0.0;
  for (const auto& v : values_) s += v;
  return s;
}

double SparseMatrix::norm_frobenius() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(s);
}

double SparseMatrix::norm_one() const {
  std::vector<double> colsum(ncols_, 0.0);
  for (Index p = 0; p < values_.size(); ++p) {
    colsum[col_indices_[p]] += std::abs(values_[p]);
  }
  return colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
}

double SparseMatrix::norm_inf() const {
  double best = 0.0;
  for (Index i = 0; i < nrows_; ++i) {
    double s = 0.0;
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      s += std::abs(values_[p]);
    }
    best = std::max(best, s);
  }
  return best;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(static_cast<Eigen::Index>(nrows_),
                                    static_cast<Eigen::Index>(ncols_));
  for (Index i = 0; i < nrows_; ++i) {
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      d(static_cast<Eigen::Index>(i),
        static_cast<Eigen::Index>(col_indices_[p])) += values_[p];
    }
  }
  return d;
}

Eigen::SparseMatrix<cplx, Eigen::ColMajor> SparseMatrix::to_eigen() const {
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(values_.size());
  for (Index i = 0; i < nrows_; ++i) {
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      t.emplace_back(static_cast<int>(i), static_cast<int>(col_indices_[p]),
                     values_[p]);
    }
  }
  Eigen::SparseMatrix<cplx, Eigen::ColMajor> m(
      static_cast<Eigen::Index>(nrows_), static_cast<Eigen::Index>(ncols_));
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

Vec spmv(const SparseMatrix& a, const Vec& x) { return a.multiply(x); }

SparseMatrix add(cplx alpha, const SparseMatrix& a, cplx beta,
                 const SparseMatrix& b) {
  require_dims(a.rows() == b.rows() && a.cols() == b.cols(), "add: shapes differ");
  std::vector<Index> offsets(a.rows() + 1, 0);
  std::vector<Index> cols;
  std::vector<cplx> vals;
  cols.reserve(a.nnz() + b.nnz());
  vals.reserve(a.nnz() + b.nnz());
  const auto& ao = a.row_offsets();
  const auto& bo = b.row_offsets();
  for (Index i = 0; i < a.rows(); ++i) {
    Index p = ao[i];
    Index q = bo[i];
    while (p < ao[i + 1] || q < bo[i + 1]) {
      const Index ca = p < ao[i + 1] ? a.col_indices()[p] : a.cols();
      const Index cb = q < bo[i + 1] ? b.col_indices()[q] : b.cols();
      if (ca == cb) {
        cols.push_back(ca);
        vals.push_back(alpha * a.values()[p++] + beta * b.values()[q++]);
      } else if (ca < cb) {
        cols.push_back(ca);
        vals.push_back(alpha * a.values()[p++]);
      } else {
        cols.push_back(cb);
        vals.push_back(beta * b.values()[q++]);
      }
    }
    offsets[i + 1] = cols.size();
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(cols),
                      std::move(vals));
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  require_dims(a.cols() == b.rows(), "sparse product: inner dimensions differ");
  std::vector<Triplet> t;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      const Index k = a.col_indices()[p];
      for (Index q = b.row_offsets()[k]; q < b.row_offsets()[k + 1]; ++q) {
        t.push_back({i, b.col_indices()[q], a.values()[p] * b.values()[q]});
      }
    }
  }
  return SparseMatrix::from_triplets(a.rows(), b.cols(), std::move(t));
}

SparseMatrix shifted(const SparseMatrix& a, cplx shift) {
  require_dims(a.rows() == a.cols(), "shift of a non-square matrix");
  return add(1.0, a, -shift, SparseMatrix::identity(a.rows()));
}

double norm2_estimate(const SparseMatrix& a, int iterations) {
  if (a.nnz() == 0) return 0.0;
  Vec x(static_cast<Eigen::Index>(a.cols()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    // Fixed, non-symmetric start so no singular direction is missed by symmetry.
    x[i] = cplx(1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3),
                0.25 * std::cos(1.3 * static_cast<double>(i)));
  }
  x.normalize();
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Vec z = a.multiply_adjoint(a.multiply(x));
    const double nz = z.norm();
    if (nz == 0.0) return sigma;
    const double next = std::sqrt(nz);
    x = z / nz;
    const bool done = std::abs(next - sigma) <= 1e-12 * next;
    sigma = next;
    if (done) break;
  }
  return sigma;
}

}  // namespace hk
