#include "helmkrylov/krylov/linear_operator.hpp"

namespace hk {

LinearOperator::LinearOperator(Index n, ApplyFn fn, std::string name)
    : n_(n), fn_(std::make_shared<const ApplyFn>(std::move(fn))), name_(std::move(name)) {}

LinearOperator LinearOperator::from_matrix(std::shared_ptr<const SparseMatrix> a, std::string name) {
  if (!a || a->rows() != a->cols()) throw DimensionError("operator: matrix must be square");
  const Index n = a->rows();
  return LinearOperator(n, [a](const Vec& x, Vec& y) { a->multiply(x, y); }, std::move(name));
}

LinearOperator LinearOperator::from_matrix(const SparseMatrix& a, std::string name) {
  return from_matrix(std::make_shared<const SparseMatrix>(a), std::move(name));
}

LinearOperator LinearOperator::from_dense(DenseMatrix a, std::string name) {
  if (a.rows() != a.cols()) throw DimensionError("operator: matrix must be square");
  auto m = std::make_shared<const DenseMatrix>(std::move(a));
  const Index n = static_cast<Index>(m->rows());
  return LinearOperator(n, [m](const Vec& x, Vec& y) { y.noalias() = (*m) * x; }, std::move(name));
}

LinearOperator LinearOperator::identity(Index n) {
  return LinearOperator(n, [](const Vec& x, Vec& y) { y = x; }, "I");
}

Vec LinearOperator::apply(const Vec& x) const {
  Vec y;
  apply(x, y);
  return y;
}

void LinearOperator::apply(const Vec& x, Vec& y) const {
  require_dims(static_cast<Index>(x.size()) == n_, "operator apply");
  if (!fn_) throw Error("operator: empty");
  (*fn_)(x, y);
}

LinearOperator LinearOperator::compose(const LinearOperator& other) const {
  require_dims(other.size() == n_, "operator composition");
  auto outer = fn_;
  auto inner = other.fn_;
  return LinearOperator(
      n_,
      [outer, inner](const Vec& x, Vec& y) {
        Vec tmp;
        (*inner)(x, tmp);
        (*outer)(tmp, y);
      },
      name_ + "*" + other.name_);
}

double true_residual(const SparseMatrix& a, const RecoveryChain& chain, const Vec& x, const Vec& b) {
  require_dims(static_cast<Index>(b.size()) == a.rows(), "true_residual");
  const Vec u = chain(x);
  require_dims(static_cast<Index>(u.size()) == a.cols(), "true_residual: recovered vector");
  const double nb = b.norm();
  const Vec r = b - a.multiply(u);
  return nb == 0.0 ? r.norm() : r.norm() / nb;
}

}  // namespace hk
