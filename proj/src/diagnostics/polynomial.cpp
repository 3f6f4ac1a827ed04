#include "helmkrylov/diagnostics/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

namespace hk {

cplx s_value(const Vec& lambda_j, const Vec& nu_j, cplx z) {
  if (lambda_j.size() != nu_j.size()) throw DimensionError("s_ratio: |Lambda_J| != |N_J|");
  cplx num = 1.0, den = 1.0;
  for (Eigen::Index i = 0; i < lambda_j.size(); ++i) {
    if (lambda_j[i] == 0.0) throw DomainError("s_ratio: zero eigenvalue");
    if (nu_j[i] == 0.0) throw DomainError("s_ratio: zero harmonic Ritz value");
    if (std::abs(z - nu_j[i]) <= 1e-14 * std::max(std::abs(z), std::abs(nu_j[i]))) {
      throw DomainError("s_ratio: evaluation point at a pole");
    }
    num *= 1.0 - z / lambda_j[i];
    den *= 1.0 - z / nu_j[i];
  }
  return num / den;
}

double s_ratio(const Vec& lambda_j, const Vec& nu_j, const Vec& points) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    worst = std::max(worst, std::abs(s_value(lambda_j, nu_j, points[i])));
  }
  if (points.size() == 0 && lambda_j.size() != nu_j.size()) {
    throw DimensionError("s_ratio: |Lambda_J| != |N_J|");
  }
  return worst;
}

MinimaxResult minimax_poly(const Vec& points, Index m, const MinimaxOptions& opts) {
  const Eigen::Index n = points.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (points[i] == 0.0) throw DomainError("minimax: 0 is among the points");
  }
  MinimaxResult res;
  res.certified = true;
  if (n == 0) return res;
  if (m == 0) {
    res.value = res.lower = 1.0;
    return res;
  }

  // Orthonormal basis of P_{m-1} on the points (Arnoldi on diag(z)),
  // stopped early when the points support fewer polynomials.
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  DenseMatrix q(n, static_cast<Eigen::Index>(m));
  q.col(0).setConstant(inv_sqrt_n);
  Eigen::Index cols = 1;
  for (; cols < static_cast<Eigen::Index>(m); ++cols) {
    Vec v = points.cwiseProduct(q.col(cols - 1));
    const double before = v.norm();
    for (int pass = 0; pass < 2; ++pass) v -= q.leftCols(cols) * (q.leftCols(cols).adjoint() * v);
    const double nv = v.norm();
    if (nv <= 1e-13 * before) break;
    q.col(cols) = v / nv;
  }
  if (cols < static_cast<Eigen::Index>(m) || static_cast<Eigen::Index>(m) >= n) {
    // At most m distinct points: Π(1 − z/z_i) annihilates them.
    res.value = 0.0;
    res.lower = 0.0;
    return res;
  }
  const DenseMatrix c = points.asDiagonal() * q.leftCols(cols);

  RealVec w = RealVec::Constant(n, 1.0 / static_cast<double>(n));
  double best = std::numeric_limits<double>::infinity();
  double lower = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const RealVec sw = w.cwiseSqrt();
    const DenseMatrix wc = sw.asDiagonal() * c;
    const Vec rhs = -sw.cast<cplx>();
    const Vec a = wc.colPivHouseholderQr().solve(rhs);
    const Vec e = Vec::Ones(n) + c * a;
    const RealVec ae = e.cwiseAbs();
    best = std::min(best, ae.maxCoeff());
    lower = std::max(lower, std::sqrt(w.dot(ae.cwiseAbs2())));
    res.iterations = it + 1;
    if (best - lower <= opts.tol * best) break;
    RealVec nw = w.cwiseProduct(ae);
    const double s = nw.sum();
    if (!(s > 0.0)) break;
    w = nw / s;
  }
  res.value = best;
  res.lower = std::min(lower, best);
  res.certified = best - lower <= opts.tol * best;
  return res;
}

}  // namespace hk
