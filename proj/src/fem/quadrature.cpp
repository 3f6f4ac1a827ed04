#include "helmkrylov/fem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

namespace hk {

std::vector<QuadPoint> gauss_legendre_01(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre rule needs at least one point");
  // Golub–Welsch: nodes are eigenvalues of the Jacobi matrix on [-1, 1].
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    j(i, i - 1) = j(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  std::vector<QuadPoint> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    out[static_cast<std::size_t>(i)] = {0.5 * (es.eigenvalues()[i] + 1.0), 0.0, v0 * v0};
  }
  return out;
}

const std::vector<QuadPoint>& triangle_rule(int degree) {
  static std::mutex mu;
  static std::map<int, std::vector<QuadPoint>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;

  const int d = std::max(degree, 0);
  // The Jacobian factor (1 − u) raises the degree in u by one.
  const auto gu = gauss_legendre_01((d + 3) / 2);
  const auto gv = gauss_legendre_01((d + 2) / 2);
  std::vector<QuadPoint> rule;
  rule.reserve(gu.size() * gv.size());
  for (const auto& a : gu) {
    for (const auto& b : gv) {
      rule.push_back({a.x, b.x * (1.0 - a.x), a.w * b.w * (1.0 - a.x)});
    }
  }
  return cache.emplace(degree, std::move(rule)).first->second;
}

}  // namespace hk
