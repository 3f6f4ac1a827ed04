#pragma once

#include <functional>
#include <memory>
#include <string>

#include "helmkrylov/linalg/sparse_matrix.hpp"

namespace hk {

/// Square linear map given by a callable. Cheap to copy; the callable and
/// whatever it captures are shared.
class LinearOperator {
 public:
  using ApplyFn = std::function<void(const Vec& in, Vec& out)>;

  LinearOperator() = default;
  LinearOperator(Index n, ApplyFn fn, std::string name = "op");

  static LinearOperator from_matrix(std::shared_ptr<const SparseMatrix> a, std::string name = "A");
  static LinearOperator from_matrix(const SparseMatrix& a, std::string name = "A");
  static LinearOperator from_dense(DenseMatrix a, std::string name = "A");
  static LinearOperator identity(Index n);

  Index size() const { return n_; }
  const std::string& name() const { return name_; }

  Vec apply(const Vec& x) const;
  void apply(const Vec& x, Vec& y) const;

  /// this ∘ other (apply `other` first).
  LinearOperator compose(const LinearOperator& other) const;

 private:
  Index n_ = 0;
  std::shared_ptr<const ApplyFn> fn_;
  std::string name_;
};

/// Maps the iterate of an accelerated solve back to the solution of Au = b.
struct RecoveryChain {
  std::string name = "identity";
  std::function<Vec(const Vec&)> recover;

  Vec operator()(const Vec& x) const { return recover ? recover(x) : x; }
};

/// ‖b − A·chain(x)‖ / ‖b‖.
double true_residual(const SparseMatrix& a, const RecoveryChain& chain, const Vec& x, const Vec& b);

}  // namespace hk
