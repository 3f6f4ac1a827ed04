#pragma once

#include <memory>
#include <optional>

#include "helmkrylov/linalg/sparse_matrix.hpp"

namespace hk {

enum class FactorKind { ExactLU, ILU0, ILUT };

const char* to_string(FactorKind kind);
FactorKind factor_kind_from_string(const std::string& name);

struct IluOptions {
  FactorKind kind = FactorKind::ILU0;
  /// ILUT drop tolerance, relative to the 2-norm of the current row of A.
  double drop_tol = 1e-3;
  /// ILUT: maximum number of off-diagonal entries kept per row in L and in U.
  Index fill = 10;
  /// Optional explicit shift added to every diagonal pivot. Never applied
  /// silently: a zero pivot without a shift is an error.
  std::optional<double> pivot_shift;
};

/// Exact sparse LU or incomplete LU of a square matrix.
///
/// For the incomplete variants `solve` performs the two triangular sweeps
/// U^{-1} L^{-1} v. L has unit diagonal (not stored); U stores its diagonal.
class Factorization {
 public:
  FactorKind kind() const { return kind_; }
  Index size() const { return n_; }

  Vec solve(const Vec& b) const;
  /// Solves with the adjoint, (LU)^* y = b.
  Vec solve_adjoint(const Vec& b) const;

  /// Strictly lower factor (incomplete kinds only).
  const SparseMatrix& lower() const;
  /// Upper factor including its diagonal (incomplete kinds only).
  const SparseMatrix& upper() const;

  friend Factorization lu_factor(const SparseMatrix& a);
  friend Factorization ilu(const SparseMatrix& a, const IluOptions& opts);

 private:
  struct ExactImpl;

  FactorKind kind_ = FactorKind::ILU0;
  Index n_ = 0;
  std::shared_ptr<const ExactImpl> exact_;
  SparseMatrix lower_;
  SparseMatrix upper_;
};

/// Sparse LU with fill-reducing column ordering and partial pivoting.
/// Throws SingularMatrixError when a zero pivot survives pivoting.
Factorization lu_factor(const SparseMatrix& a);

/// Incomplete LU. Throws SingularMatrixError naming the row of a zero pivot.
Factorization ilu(const SparseMatrix& a, const IluOptions& opts = {});

/// Dispatches on `opts.kind` between lu_factor and ilu.
Factorization factorize(const SparseMatrix& a, const IluOptions& opts);

}  // namespace hk
