#pragma once

#include "helmkrylov/linalg/factorization.hpp"
#include "helmkrylov/linalg/sparse_matrix.hpp"

namespace hk {

inline constexpr Index kDefaultDenseEigCap = 4000;

/// Eigen-decomposition with bi-normalized left/right eigenvectors.
///
/// Column i of `right` is v_i, column i of `left` is v̂_i with v̂_i^* v_i = 1.
/// `condition[i]` is κ(λ_i) = ‖v_i‖‖v̂_i‖ (≥ 1). Partial decompositions
/// (shift-invert) leave `left` and `condition` empty.
struct DenseEig {
  Vec values;
  DenseMatrix right;
  DenseMatrix left;
  RealVec condition;
  /// Relative eigen-residuals ‖A v_i − λ_i v_i‖ / (‖A‖‖v_i‖).
  RealVec residuals;

  Index size() const { return static_cast<Index>(values.size()); }
};

/// Full spectrum of a dense matrix, sorted by modulus ascending.
/// Refuses matrices larger than `cap`; use shift_invert_eigs instead.
/// Exactly Hermitian input goes through the symmetric solver, which gives
/// orthonormal eigenvectors and κ = 1.
DenseEig eig_dense(const DenseMatrix& a, Index cap = kDefaultDenseEigCap);

struct SingularValue {
  double value = 0.0;
  bool singular = false;
};

struct SminOptions {
  /// Below this order the dense SVD is used.
  Index dense_cutoff = 400;
  double rel_tol = 1e-10;
  int max_steps = 300;
};

SingularValue smallest_singular_value(const DenseMatrix& a);
/// Lanczos on (A^*A)^{-1} through the sparse LU of A, or dense SVD for small
/// orders.
SingularValue smallest_singular_value(const SparseMatrix& a,
                                      const SminOptions& opts = {});

bool is_hermitian(const SparseMatrix& a);

struct Inertia {
  Index negative = 0;
  Index positive = 0;
};

/// Sylvester inertia from a sparse LDL^* factorization (AMD ordering, no
/// pivoting). Throws DomainError for a non-Hermitian matrix and
/// SingularMatrixError when a pivot vanishes, in which case the count is
/// undecided rather than zero.
Inertia hermitian_inertia(const SparseMatrix& a);

struct ShiftInvertOptions {
  /// Subspace dimension; 0 picks max(2·count, count + 8).
  Index subspace = 0;
  int max_iterations = 500;
  /// Required ‖Av − λv‖ / (‖A‖‖v‖).
  double tol = 1e-10;
  unsigned seed = 12345;
};

/// Raised when shift-invert fails to converge; carries what did converge.
class EigenConvergenceError : public Error {
 public:
  EigenConvergenceError(const std::string& what, DenseEig converged)
      : Error(what), converged_(std::move(converged)) {}
  const DenseEig& converged() const { return converged_; }

 private:
  DenseEig converged_;
};

/// The `count` eigenvalues nearest `shift`, ordered by distance to it,
/// with unit right eigenvectors. Subspace iteration on (A − shift·I)^{-1}
/// with Rayleigh–Ritz extraction.
DenseEig shift_invert_eigs(const SparseMatrix& a, cplx shift, Index count,
                           const ShiftInvertOptions& opts = {});

}  // namespace hk
