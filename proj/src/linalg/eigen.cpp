#include "helmkrylov/linalg/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

namespace hk {

namespace {

bool modulus_less(const cplx& a, const cplx& b) {
  const double ma = std::abs(a);
  const double mb = std::abs(b);
  if (ma != mb) return ma < mb;
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

DenseMatrix orthonormal_columns(const DenseMatrix& x) {
  Eigen::HouseholderQR<DenseMatrix> qr(x);
  return qr.householderQ() * DenseMatrix::Identity(x.rows(), x.cols());
}

}  // namespace

DenseEig eig_dense(const DenseMatrix& a, Index cap) {
  if (a.rows() != a.cols()) throw DimensionError("eig_dense: matrix not square");
  if (static_cast<Index>(a.rows()) > cap) {
    std::ostringstream os;
    os << "eig_dense: order " << a.rows() << " exceeds the dense cap " << cap
       << "; use shift_invert_eigs for a subset of the spectrum";
    throw DomainError(os.str());
  }
  const Eigen::Index n = a.rows();
  Vec ev;
  DenseMatrix vecs;
  const bool hermitian = n > 0 && a == a.adjoint();
  if (hermitian) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(a);
    if (es.info() != Eigen::Success) throw Error("eig_dense: Hermitian eigensolver failed");
    ev = es.eigenvalues().cast<cplx>();
    vecs = es.eigenvectors();
  } else if (a.imag().cwiseAbs().maxCoeff() == 0.0 && n > 0) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a.real(), true);
    if (es.info() != Eigen::Success) throw Error("eig_dense: QR iteration failed");
    ev = es.eigenvalues();
    vecs = es.eigenvectors();
  } else {
    Eigen::ComplexEigenSolver<DenseMatrix> es(a, true);
    if (es.info() != Eigen::Success) throw Error("eig_dense: QR iteration failed");
    ev = es.eigenvalues();
    vecs = es.eigenvectors();
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return modulus_less(ev[i], ev[j]);
  });

  DenseEig out;
  out.values.resize(n);
  out.right.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    out.values[c] = ev[order[static_cast<std::size_t>(c)]];
    out.right.col(c) = vecs.col(order[static_cast<std::size_t>(c)]).normalized();
  }
  // Rows of V^{-1} are the conjugated left eigenvectors, so V^{-*} carries
  // the bi-normalized v̂_i as columns.
  if (hermitian) {
    out.left = out.right;
  } else {
    Eigen::PartialPivLU<DenseMatrix> lu(out.right);
    out.left = lu.inverse().adjoint();
  }
  out.condition.resize(n);
  out.residuals.resize(n);
  const double anorm = std::max(a.norm(), std::numeric_limits<double>::min());
  for (Eigen::Index c = 0; c < n; ++c) {
    out.condition[c] = out.right.col(c).norm() * out.left.col(c).norm();
    out.residuals[c] = (a * out.right.col(c) - out.values[c] * out.right.col(c)).norm() /
                       (anorm * out.right.col(c).norm());
  }
  return out;
}

SingularValue smallest_singular_value(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("s_min: matrix not square");
  if (a.rows() == 0) return {0.0, true};
  Eigen::BDCSVD<DenseMatrix> svd(a);
  const auto& s = svd.singularValues();
  const double smax = s[0];
  const double smin = s[s.size() - 1];
  if (smin <= std::numeric_limits<double>::epsilon() * smax * 0.5 || smax == 0.0) {
    return {0.0, true};
  }
  return {smin, false};
}

SingularValue smallest_singular_value(const SparseMatrix& a,
                                      const SminOptions& opts) {
  if (a.rows() != a.cols()) throw DimensionError("s_min: matrix not square");
  if (a.rows() <= opts.dense_cutoff) return smallest_singular_value(a.to_dense());

  Factorization lu;
  try {
    lu = lu_factor(a);
  } catch (const SingularMatrixError&) {
    return {0.0, true};
  }

  // Lanczos with full reorthogonalization on B = A^{-1} A^{-*}; its largest
  // eigenvalue is 1 / s_min².
  const Eigen::Index n = static_cast<Eigen::Index>(a.rows());
  const int steps = std::min<int>(opts.max_steps, static_cast<int>(n));
  DenseMatrix q(n, steps + 1);
  std::vector<double> alpha, beta;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = cplx(1.0 + 0.37 * std::sin(1.7 * static_cast<double>(i)),
                0.21 * std::cos(0.9 * static_cast<double>(i)));
  }
  q.col(0) = v.normalized();
  double previous = 0.0;
  double theta = 0.0;
  for (int j = 0; j < steps; ++j) {
    Vec w = lu.solve(lu.solve_adjoint(q.col(j)));
    if (!w.allFinite()) return {0.0, true};
    const double aj = q.col(j).dot(w).real();
    alpha.push_back(aj);
    w -= aj * q.col(j);
    if (j > 0) w -= beta.back() * q.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      w -= q.leftCols(j + 1) * (q.leftCols(j + 1).adjoint() * w);
    }
    const double bj = w.norm();

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(j + 1, j + 1);
    for (int k = 0; k <= j; ++k) {
      t(k, k) = alpha[static_cast<std::size_t>(k)];
      if (k < j) t(k, k + 1) = t(k + 1, k) = beta[static_cast<std::size_t>(k)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    theta = es.eigenvalues()[j];
    const double ritz_residual = bj * std::abs(es.eigenvectors()(j, j));
    if (ritz_residual <= opts.rel_tol * theta ||
        (j > 2 && std::abs(theta - previous) <= opts.rel_tol * theta * 1e-2) ||
        bj <= std::numeric_limits<double>::epsilon() * theta) {
      break;
    }
    previous = theta;
    beta.push_back(bj);
    q.col(j + 1) = w / bj;
  }
  if (!(theta > 0.0) || !std::isfinite(theta)) return {0.0, true};
  return {1.0 / std::sqrt(theta), false};
}

bool is_hermitian(const SparseMatrix& a) {
  if (a.rows() != a.cols()) return false;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      if (a.at(a.col_indices()[k], i) != std::conj(a.values()[k])) return false;
    }
  }
  return true;
}

Inertia hermitian_inertia(const SparseMatrix& a) {
  if (!is_hermitian(a)) throw DomainError("inertia: matrix is not Hermitian");
  Inertia out;
  if (a.rows() == 0) return out;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<cplx>, Eigen::Lower, Eigen::AMDOrdering<int>> ldl(a.to_eigen());
  if (ldl.info() != Eigen::Success) throw SingularMatrixError("inertia: LDL^* factorization failed");
  const Vec d = ldl.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double v = d[i].real();
    if (!std::isfinite(v) || std::abs(v) <= 1e-14 * dmax) {
      throw SingularMatrixError("inertia: pivot " + std::to_string(i) + " vanishes");
    }
    (v < 0.0 ? out.negative : out.positive) += 1;
  }
  return out;
}

DenseEig shift_invert_eigs(const SparseMatrix& a, cplx shift, Index count,
                           const ShiftInvertOptions& opts) {
  if (a.rows() != a.cols()) throw DimensionError("shift-invert: matrix not square");
  const Index n = a.rows();
  if (count == 0) return {};
  if (count > n) throw DomainError("shift-invert: more eigenvalues requested than the order");
  Index p = opts.subspace != 0 ? opts.subspace : std::max(2 * count, count + 8);
  p = std::min(p, n);

  const Factorization lu = lu_factor(shifted(a, shift));
  const double anorm = norm2_estimate(a);

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  DenseMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = cplx(gauss(rng), gauss(rng));
  }
  x = orthonormal_columns(x);

  // Rayleigh-Ritz on (A − σI)^{-1}: projecting A itself yields spurious
  // Ritz values near σ when A is indefinite.
  const bool hermitian = shift.imag() == 0.0 && is_hermitian(a);

  DenseEig best;
  double stalled = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    DenseMatrix y(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) y.col(j) = lu.solve(x.col(j));
    const DenseMatrix g = x.adjoint() * y;
    Vec theta;
    DenseMatrix w;
    if (hermitian) {
      Eigen::SelfAdjointEigenSolver<DenseMatrix> es(DenseMatrix(0.5 * (g + g.adjoint())));
      theta = es.eigenvalues().cast<cplx>();
      w = es.eigenvectors();
    } else {
      Eigen::ComplexEigenSolver<DenseMatrix> es(g, true);
      theta = es.eigenvalues();
      w = es.eigenvectors();
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
      const double ti = std::abs(theta[i]), tj = std::abs(theta[j]);
      return ti != tj ? ti > tj : modulus_less(theta[j], theta[i]);
    });

    DenseEig current;
    current.values.resize(static_cast<Eigen::Index>(count));
    current.right.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(count));
    current.residuals.resize(static_cast<Eigen::Index>(count));
    Index converged = 0;
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(count); ++c) {
      const Eigen::Index src = order[static_cast<std::size_t>(c)];
      const Vec v = (x * w.col(src)).normalized();
      const cplx lambda = shift + 1.0 / theta[src];
      const double res = (a.multiply(v) - lambda * v).norm() / anorm;
      current.values[c] = lambda;
      current.right.col(c) = v;
      current.residuals[c] = res;
      if (res <= opts.tol && converged == static_cast<Index>(c)) ++converged;
    }
    if (converged == count) return current;
    stalled = current.residuals[static_cast<Eigen::Index>(converged)];

    best = DenseEig{};
    best.values = current.values.head(static_cast<Eigen::Index>(converged));
    best.right = current.right.leftCols(static_cast<Eigen::Index>(converged));
    best.residuals = current.residuals.head(static_cast<Eigen::Index>(converged));
    x = orthonormal_columns(y);
  }
  std::ostringstream os;
  os << "shift-invert did not converge within " << opts.max_iterations
     << " iterations (" << best.size() << " of " << count
     << " pairs converged, next residual " << stalled << ")";
  throw EigenConvergenceError(os.str(), std::move(best));
}

}  // namespace hk
