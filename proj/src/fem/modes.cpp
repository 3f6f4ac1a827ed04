#include "helmkrylov/fem/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "helmkrylov/fem/quadrature.hpp"

namespace hk {

Vec interpolate(const FeSpace& space, const ScalarField& f) {
  Vec v(static_cast<Eigen::Index>(space.ndof()));
  for (Index g = 0; g < space.ndof(); ++g) v[static_cast<Eigen::Index>(g)] = f(space.dof_coords()[g]);
  return v;
}

Vec project_mode(const FeSpace& space, const ScalarField& f) {
  const auto& fr = space.free_dofs();
  Vec v(static_cast<Eigen::Index>(fr.size()));
  for (Index i = 0; i < fr.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(space.dof_coords()[fr[i]]);
  return v;
}

ScalarField cavity_mode(int n, int m) {
  const double pi = std::numbers::pi;
  return [=](Point p) { return cplx(std::sin(n * pi * p.x) * std::sin(m * pi * p.y)); };
}

double cavity_eigenvalue(int n, int m) {
  return std::numbers::pi * std::numbers::pi * static_cast<double>(n * n + m * m);
}

std::vector<ModeIndex> negative_cavity_modes(double k) {
  std::vector<ModeIndex> out;
  const double k2 = k * k;
  for (int n = 1; cavity_eigenvalue(n, 1) < k2; ++n) {
    for (int m = 1; cavity_eigenvalue(n, m) < k2; ++m) out.push_back({n, m});
  }
  std::stable_sort(out.begin(), out.end(), [](const ModeIndex& a, const ModeIndex& b) {
    const int sa = a.n * a.n + a.m * a.m, sb = b.n * b.n + b.m * b.m;
    if (sa != sb) return sa > sb;
    return a.n < b.n;
  });
  return out;
}

DirichletSide dirichlet_side_from_string(const std::string& name) {
  if (name == "opening") return DirichletSide::Opening;
  if (name == "back") return DirichletSide::Back;
  throw ConfigError("unknown Dirichlet side '" + name + "' (expected opening or back)");
}

ScalarField open_cavity_mode(const ScatterGeometry& geom, int n, int m, DirichletSide side) {
  const double pi = std::numbers::pi;
  const ScatterGeometry g = geom;
  return [=](Point p) {
    if (!g.in_cavity(p)) return cplx(0.0);
    const double xi = side == DirichletSide::Opening ? p.x - g.opening_x() : g.back_x() - p.x;
    return cplx(std::cos(n * pi * (p.y + g.l_O / 2.0) / g.l_O) *
                std::sin((m + 0.5) * pi * xi / g.L_O));
  };
}

namespace {

// Solution of −g'' + a2·g = 1 on (0,1) with g(0) = g(1) = 0.
double series_profile(double a2, double y) {
  const double z = y - 0.5;
  if (std::abs(a2) < 1e-12) return 0.5 * y * (1.0 - y);
  if (a2 > 0.0) {
    const double a = std::sqrt(a2);
    // cosh(a z)/cosh(a/2) without overflow.
    const double ratio = std::exp(a * (std::abs(z) - 0.5)) * (1.0 + std::exp(-2.0 * a * std::abs(z))) /
                         (1.0 + std::exp(-a));
    return (1.0 - ratio) / a2;
  }
  const double b = std::sqrt(-a2);
  return -(1.0 - std::cos(b * z) / std::cos(b / 2.0)) / (-a2);
}

}  // namespace

ScalarField cavity_exact_solution(double k, int max_index) {
  const double pi = std::numbers::pi;
  return [=](Point p) {
    double u = 0.0;
    for (int n = 1; n <= max_index; n += 2) {
      const double a2 = n * n * pi * pi - k * k;
      u += 4.0 / (n * pi) * std::sin(n * pi * p.x) * series_profile(a2, p.y);
    }
    return cplx(u);
  };
}

double l2_error(const SparseMatrix& mass, const Vec& uh, const Vec& uref) {
  require_dims(uh.size() == uref.size() && static_cast<Index>(uh.size()) == mass.rows(), "l2_error");
  const double ref = std::sqrt(std::abs(uref.dot(mass.multiply(uref))));
  if (ref == 0.0) throw DomainError("l2_error: reference has zero norm");
  const Vec e = uh - uref;
  return std::sqrt(std::abs(e.dot(mass.multiply(e)))) / ref;
}

double l2_error(const FeSpace& space, const Vec& uh_full, const ScalarField& uref) {
  require_dims(static_cast<Index>(uh_full.size()) == space.ndof(), "l2_error: full vector");
  const Mesh& m = space.mesh();
  const auto& rule = triangle_rule(2 * space.degree() + 4);
  std::vector<Eigen::VectorXd> phi;
  for (const auto& q : rule) phi.push_back(space.element().values(q.x, q.y));
  double err = 0.0, ref = 0.0;
  for (Index t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles()[t];
    const Point& a = m.vertices()[tri[0]];
    const Point& b = m.vertices()[tri[1]];
    const Point& c = m.vertices()[tri[2]];
    const double det = std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
    const auto dofs = space.element_dofs(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      cplx uhq = 0.0;
      for (Eigen::Index i = 0; i < phi[q].size(); ++i) uhq += uh_full[static_cast<Eigen::Index>(dofs[static_cast<std::size_t>(i)])] * phi[q][i];
      const Point x{a.x + rule[q].x * (b.x - a.x) + rule[q].y * (c.x - a.x),
                    a.y + rule[q].x * (b.y - a.y) + rule[q].y * (c.y - a.y)};
      const cplx ur = uref(x);
      err += rule[q].w * det * std::norm(uhq - ur);
      ref += rule[q].w * det * std::norm(ur);
    }
  }
  if (ref == 0.0) throw DomainError("l2_error: reference has zero norm");
  return std::sqrt(err / ref);
}

}  // namespace hk
