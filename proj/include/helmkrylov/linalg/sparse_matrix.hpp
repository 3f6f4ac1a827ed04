#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "helmkrylov/linalg/types.hpp"

namespace hk {

struct Triplet {
  Index row;
  Index col;
  cplx value;
};

/// Complex compressed-row sparse matrix.
///
/// Immutable once built. Column indices are strictly increasing within each
/// row. Structural zeros may be stored (assembly keeps the full element
/// pattern); `compress()` drops them.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index nrows, Index ncols, std::vector<Index> row_offsets,
               std::vector<Index> col_indices, std::vector<cplx> values);

  /// Sums duplicate entries. Summation order within an entry follows the
  /// order of appearance in `triplets`, so results are reproducible.
  static SparseMatrix from_triplets(Index nrows, Index ncols,
                                    std::vector<Triplet> triplets);
  static SparseMatrix identity(Index n);
  static SparseMatrix diagonal(const Vec& d);
  static SparseMatrix from_dense(const DenseMatrix& a, double drop_tol = 0.0);
  static SparseMatrix from_eigen(
      const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& a);

  Index rows() const { return nrows_; }
  Index cols() const { return ncols_; }
  Index nnz() const { return values_.size(); }
  const std::vector<Index>& row_offsets() const { return row_offsets_; }
  const std::vector<Index>& col_indices() const { return col_indices_; }
  const std::vector<cplx>& values() const { return values_; }

  /// Entry (i, j), zero when not stored.
  cplx at(Index i, Index j) const;
  bool has_entry(Index i, Index j) const;

  Vec multiply(const Vec& x) const;
  void multiply(const Vec& x, Vec& y) const;
  Vec multiply_adjoint(const Vec& x) const;

  SparseMatrix compress(double drop_tol = 0.0) const;
  SparseMatrix adjoint() const;
  SparseMatrix transpose() const;
  SparseMatrix scaled(cplx alpha) const;
  /// Submatrix selecting `rows` and `cols` (index lists, in the given order).
  SparseMatrix select(const std::vector<Index>& rows,
                      const std::vector<Index>& cols) const;

  Vec diagonal_values() const;
  Vec row_sums() const;
  cplx sum() const;

  double norm_frobenius() const;
  double norm_one() const;
  double norm_inf() const;

  DenseMatrix to_dense() const;
  Eigen::SparseMatrix<cplx, Eigen::ColMajor> to_eigen() const;

  /// Checks the CSR invariants; returns an empty string when valid.
  std::string validate() const;

 private:
  Index nrows_ = 0;
  Index ncols_ = 0;
  std::vector<Index> row_offsets_{0};
  std::vector<Index> col_indices_;
  std::vector<cplx> values_;
};

/// y = A x.
Vec spmv(const SparseMatrix& a, const Vec& x);

/// alpha*A + beta*B on the union pattern.
SparseMatrix add(cplx alpha, const SparseMatrix& a, cplx beta,
                 const SparseMatrix& b);

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

/// A - shift*I.
SparseMatrix shifted(const SparseMatrix& a, cplx shift);

/// Estimate of the spectral norm by power iteration on A*A with a fixed
/// starting vector. Deterministic; converges from below.
double norm2_estimate(const SparseMatrix& a, int iterations = 50);

}  // namespace hk
