#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "helmkrylov/fem/assembly.hpp"
#include "helmkrylov/fem/modes.hpp"
#include "helmkrylov/fem/quadrature.hpp"
#include "helmkrylov/linalg/eigen.hpp"
#include "helmkrylov/linalg/factorization.hpp"
#include "test_util.hpp"

using namespace hk;
using Catch::Approx;
constexpr double kPi = std::numbers::pi;

namespace {

std::shared_ptr<const FeSpace> cavity_space(double h, int p,
                                            DiagonalPattern pat = DiagonalPattern::Uniform) {
  return std::make_shared<FeSpace>(std::make_shared<Mesh>(build_mesh_cavity(h, pat)), p);
}

// Generalized eigenvalue of (K, M) nearest sigma, by shifted inverse
// iteration started from `x`.
double generalized_eig_near(const SparseMatrix& k, const SparseMatrix& m, double sigma, Vec x) {
  auto f = lu_factor(add(1.0, k, -sigma, m));
  double mu = 0.0;
  for (int it = 0; it < 60; ++it) {
    x = f.solve(m.multiply(x));
    x /= x.norm();
    const double next = (x.dot(k.multiply(x)) / x.dot(m.multiply(x))).real();
    if (it > 0 && std::abs(next - mu) <= 1e-14 * std::abs(next)) return next;
    mu = next;
  }
  return mu;
}

// Generalized eigenvalues of (K, M) on the free dofs, ascending.
Eigen::VectorXd generalized_spectrum(const LinearSystem& sys) {
  Eigen::MatrixXd kd = sys.K.to_dense().real();
  Eigen::MatrixXd md = sys.M.to_dense().real();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(kd, md, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("cavity mesh counts", "[mesh]") {
  auto m2 = build_mesh_cavity(0.5);
  CHECK(m2.num_triangles() == 8);
  CHECK(m2.num_vertices() == 9);
  auto m32 = build_mesh_cavity(1.0 / 32);
  CHECK(m32.num_triangles() == 2048);
  CHECK(m32.num_vertices() == 1089);
  CHECK(m32.count_boundary(BoundaryTag::Dirichlet) == 128);
  double area = 0.0;
  for (Index t = 0; t < m32.num_triangles(); ++t) area += m32.area(t);
  CHECK(area == Approx(1.0).epsilon(1e-13));
  CHECK_NOTHROW(build_mesh_cavity(0.25, DiagonalPattern::AlternatingRows));
  CHECK_THROWS_AS(build_mesh_cavity(0.3), DomainError);
  CHECK_THROWS_AS(build_mesh_cavity(0.75), DomainError);
}

TEST_CASE("mesh constructor rejects broken meshes", "[mesh]") {
  std::vector<Point> v{{0, 0}, {1, 0}, {0, 1}};
  std::vector<BoundaryEdge> b{{0, 1, BoundaryTag::Dirichlet}, {1, 2, BoundaryTag::Dirichlet},
                              {2, 0, BoundaryTag::Dirichlet}};
  CHECK_NOTHROW(Mesh(v, {{0, 1, 2}}, {RegionTag::Interior}, b, "ok"));
  CHECK_THROWS_AS(Mesh(v, {{0, 2, 1}}, {RegionTag::Interior}, b, "cw"), Error);
  CHECK_THROWS_AS(Mesh(v, {{0, 1, 2}}, {RegionTag::Interior}, {b[0], b[1]}, "untagged"), Error);
  auto twice = b;
  twice.push_back({1, 0, BoundaryTag::Neumann});
  CHECK_THROWS_AS(Mesh(v, {{0, 1, 2}}, {RegionTag::Interior}, twice, "double"), Error);
}

TEST_CASE("scatter mesh geometry and tags", "[mesh]") {
  ScatterGeometry g;
  auto m = build_mesh_scatter(g);
  CHECK(m.count_boundary(BoundaryTag::Exterior) == 4 * 40);
  CHECK(static_cast<double>(m.count_boundary(BoundaryTag::Neumann)) ==
        Approx(g.obstacle_perimeter() / g.h));
  const double x = g.L + g.L_pml / 2;
  CHECK(m.regions()[m.locate({x, 0.0})] == RegionTag::PmlX);
  CHECK(m.regions()[m.locate({0.0, -x})] == RegionTag::PmlY);
  CHECK(m.regions()[m.locate({x, x})] == RegionTag::PmlXY);
  CHECK(m.regions()[m.locate({0.0, 0.0})] == RegionTag::Interior);

  ScatterGeometry tiny;
  tiny.h = 0.05;
  tiny.wall_t = tiny.h;
  tiny.L_O = 2 * tiny.h;
  tiny.l_O = 2 * tiny.h;
  tiny.x_open = -0.1;
  auto mt = build_mesh_scatter(tiny);
  CHECK(static_cast<double>(mt.count_boundary(BoundaryTag::Neumann)) ==
        Approx(tiny.obstacle_perimeter() / tiny.h));

  ScatterGeometry dir = g;
  dir.bc = ObstacleBc::Dirichlet;
  CHECK(build_mesh_scatter(dir).count_boundary(BoundaryTag::Dirichlet) ==
        m.count_boundary(BoundaryTag::Neumann));

  ScatterGeometry off = g;
  off.h = 0.03;
  CHECK_THROWS_AS(build_mesh_scatter(off), DomainError);
  ScatterGeometry big = g;
  big.L_O = 1.5;
  CHECK_THROWS_AS(build_mesh_scatter(big), DomainError);
}

TEST_CASE("quadrature exactness", "[quadrature]") {
  for (int d = 0; d <= 10; ++d) {
    const auto& rule = triangle_rule(d);
    for (int a = 0; a <= d; ++a) {
      const int b = d - a;
      double s = 0.0;
      for (const auto& q : rule) {
        CHECK(q.x > 0.0);
        CHECK(q.y > 0.0);
        CHECK(q.x + q.y < 1.0);
        s += q.w * std::pow(q.x, a) * std::pow(q.y, b);
      }
      // ∫ x^a y^b over the reference triangle = a! b! / (a + b + 2)!
      const double exact = std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 3.0);
      CHECK(s == Approx(exact).epsilon(1e-13));
    }
  }
  const auto gl = gauss_legendre_01(5);
  double s = 0.0;
  for (const auto& q : gl) s += q.w * std::pow(q.x, 9);
  CHECK(s == Approx(0.1).epsilon(1e-14));
}

TEST_CASE("Lagrange basis is nodal and a partition of unity", "[space]") {
  for (int p = 1; p <= 3; ++p) {
    LagrangeElement el(p);
    CHECK(el.num_nodes() == static_cast<Index>((p + 1) * (p + 2) / 2));
    for (Index i = 0; i < el.num_nodes(); ++i) {
      const auto v = el.values(el.nodes()[i].x, el.nodes()[i].y);
      for (Index j = 0; j < el.num_nodes(); ++j) {
        CHECK(std::abs(v[static_cast<Eigen::Index>(j)] - (i == j ? 1.0 : 0.0)) < 1e-12);
      }
    }
    CHECK(el.values(0.2, 0.3).sum() == Approx(1.0).epsilon(1e-13));
    CHECK(el.gradients(0.2, 0.3).colwise().sum().norm() < 1e-12);
  }
  CHECK_THROWS_AS(LagrangeElement(4), DomainError);
}

TEST_CASE("dof counts follow the Lagrange dimension", "[space]") {
  auto mesh = std::make_shared<Mesh>(build_mesh_cavity(1.0 / 32));
  for (int p = 1; p <= 3; ++p) {
    FeSpace s(mesh, p);
    const Index expect = mesh->num_vertices() + static_cast<Index>(p - 1) * mesh->num_edges() +
                         static_cast<Index>((p - 1) * (p - 2) / 2) * mesh->num_triangles();
    CHECK(s.ndof() == expect);
    CHECK(s.ndof() == static_cast<Index>((32 * p + 1) * (32 * p + 1)));
    CHECK(s.ndof_free() == static_cast<Index>((32 * p - 1) * (32 * p - 1)));
  }
  FeSpace p2(mesh, 2);
  CHECK(p2.ndof() == 4225);
  CHECK(p2.ndof_free() == 3969);
  for (Index e = 0; e < mesh->boundary_edges().size(); ++e) {
    for (Index g : p2.boundary_edge_dofs(e)) CHECK(p2.is_dirichlet(g));
  }
  // Shared edges see the same global dofs at the same coordinates.
  for (Index t = 0; t < mesh->num_triangles(); t += 97) {
    const auto dofs = p2.element_dofs(t);
    const auto& nodes = p2.element().nodes();
    const auto& tri = mesh->triangles()[t];
    const Point a = mesh->vertices()[tri[0]], b = mesh->vertices()[tri[1]], c = mesh->vertices()[tri[2]];
    for (Index i = 0; i < dofs.size(); ++i) {
      const Point x{a.x + nodes[i].x * (b.x - a.x) + nodes[i].y * (c.x - a.x),
                    a.y + nodes[i].x * (b.y - a.y) + nodes[i].y * (c.y - a.y)};
      CHECK(std::hypot(x.x - p2.dof_coords()[dofs[i]].x, x.y - p2.dof_coords()[dofs[i]].y) < 1e-14);
    }
  }
}

TEST_CASE("mass and stiffness basic identities", "[assembly]") {
  for (int p = 1; p <= 3; ++p) {
    auto s = cavity_space(0.25, p);
    auto full = assemble_matrices(*s);
    CHECK(std::abs(full.M.sum() - 1.0) < 1e-12);
    CHECK(full.K.row_sums().cwiseAbs().maxCoeff() < 1e-12);
    const DenseMatrix md = full.M.to_dense();
    CHECK((md - md.adjoint()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(md.real());
    CHECK(em.eigenvalues().minCoeff() > 0.0);
    const DenseMatrix kd = full.K.to_dense();
    CHECK((kd - kd.adjoint()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ek(kd.real());
    CHECK(ek.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("assembled cavity system", "[assembly]") {
  auto s = cavity_space(1.0 / 8, 2);
  const double k = 10.0;
  auto sys = assemble_cavity(s, k);
  CHECK(sys.size() == s->ndof_free());
  const auto diff = add(1.0, sys.A, -1.0, add(1.0, sys.K, -k * k, sys.M));
  CHECK(diff.compress().nnz() == 0);
  const DenseMatrix a = sys.A.to_dense();
  CHECK(a.imag().norm() == 0.0);
  CHECK((a - a.transpose()).norm() == 0.0);
  CHECK_THROWS_AS(assemble_cavity(s, 0.0), DomainError);

  auto f = lu_factor(sys.A);
  const Vec u = f.solve(sys.b);
  CHECK((sys.A.multiply(u) - sys.b).norm() / sys.b.norm() <= 1e-9);
}

TEST_CASE("Robin boundary mass", "[assembly]") {
  std::vector<Point> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<BoundaryEdge> b{{0, 1, BoundaryTag::Robin}, {1, 2, BoundaryTag::Robin},
                              {2, 3, BoundaryTag::Robin}, {3, 0, BoundaryTag::Dirichlet}};
  auto mesh = std::make_shared<Mesh>(v, std::vector<std::array<Index, 3>>{{0, 1, 2}, {0, 2, 3}},
                                     std::vector<RegionTag>(2, RegionTag::Interior), b, "square");
  for (int p = 1; p <= 3; ++p) {
    auto s = std::make_shared<FeSpace>(mesh, p);
    auto full = assemble_matrices(*s);
    CHECK(std::abs(full.B.sum() - 3.0) < 1e-13);
    ProblemData d;
    d.source = [](Point) { return cplx(1.0); };
    auto sys = assemble(s, 2.0, d);
    const auto diff = add(1.0, sys.A, -1.0, add(1.0, add(1.0, sys.K, -4.0, sys.M), 2.0 * I_unit, sys.B));
    CHECK(diff.compress(1e-14).nnz() == 0);
  }
}

TEST_CASE("generalized eigenvalues approximate the Laplacian spectrum", "[assembly]") {
  auto s = cavity_space(1.0 / 32, 2);
  auto sys = assemble_cavity(s, 1.0);
  const double mu11 = generalized_eig_near(sys.K, sys.M, 2 * kPi * kPi * 0.99, project_mode(*s, cavity_mode(1, 1)));
  const double mu33 = generalized_eig_near(sys.K, sys.M, 18 * kPi * kPi * 0.999, project_mode(*s, cavity_mode(3, 3)));
  CHECK(mu11 == Approx(2 * kPi * kPi).epsilon(1e-3));
  CHECK(mu33 == Approx(18 * kPi * kPi).epsilon(1e-3));
}

TEST_CASE("eigenvalue error converges at order 2p", "[assembly][convergence]") {
  for (int p = 1; p <= 2; ++p) {
    std::vector<double> err;
    for (double h : {1.0 / 4, 1.0 / 8, 1.0 / 16}) {
      auto s = cavity_space(h, p);
      auto sys = assemble_cavity(s, 1.0);
      const double mu = generalized_eig_near(sys.K, sys.M, 1.9 * kPi * kPi, project_mode(*s, cavity_mode(1, 1)));
      err.push_back(mu - 2 * kPi * kPi);
    }
    for (int i = 0; i < 2; ++i) {
      const double slope = std::log2(err[static_cast<std::size_t>(i)] / err[static_cast<std::size_t>(i) + 1]);
      CHECK(slope == Approx(2.0 * p).epsilon(0.15));
    }
  }
}

TEST_CASE("mode interpolation and Rayleigh quotient", "[modes]") {
  auto s = cavity_space(1.0 / 32, 2);
  const Vec one = project_mode(*s, [](Point) { return cplx(1.0); });
  CHECK((one - Vec::Ones(one.size())).norm() == 0.0);
  const Vec u11 = interpolate(*s, cavity_mode(1, 1));
  bool found = false;
  for (Index g = 0; g < s->ndof(); ++g) {
    const Point p = s->dof_coords()[g];
    if (std::abs(p.x - 0.5) < 1e-14 && std::abs(p.y - 0.5) < 1e-14) {
      CHECK(std::abs(u11[static_cast<Eigen::Index>(g)] - 1.0) < 1e-14);
      found = true;
    }
  }
  CHECK(found);
  auto sys = assemble_cavity(s, 1.0);
  const Vec z = project_mode(*s, cavity_mode(3, 3));
  const double rq = (z.dot(sys.K.multiply(z)) / z.dot(sys.M.multiply(z))).real();
  CHECK(rq == Approx(18 * kPi * kPi).epsilon(2e-3));
}

TEST_CASE("Sylvester inertia: negative eigenvalues of A match modes below k^2", "[assembly]") {
  auto s = cavity_space(1.0 / 16, 2);
  const double k = 3.01 * std::sqrt(2.0) * kPi;
  auto sys = assemble_cavity(s, k);
  const Eigen::VectorXd mu = generalized_spectrum(sys);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(sys.A.to_dense().real(), Eigen::EigenvaluesOnly);
  const auto neg_a = (ea.eigenvalues().array() < 0.0).count();
  const auto below = (mu.array() < k * k).count();
  CHECK(neg_a == below);
  int analytic = 0;
  for (int n = 1; n < 10; ++n) {
    for (int m = 1; m < 10; ++m) analytic += cavity_eigenvalue(n, m) < k * k ? 1 : 0;
  }
  CHECK(neg_a == analytic);
  CHECK(neg_a == 11);
  CHECK(hermitian_inertia(sys.A).negative == 11);
  CHECK(hermitian_inertia(sys.A).positive == sys.size() - 11);
}

TEST_CASE("L2 error helpers", "[modes]") {
  auto s = cavity_space(1.0 / 8, 2);
  auto sys = assemble_cavity(s, 5.0);
  const Vec u = project_mode(*s, cavity_mode(1, 2));
  CHECK(l2_error(sys.M, u, u) == 0.0);
  CHECK(l2_error(sys.M, Vec(2.0 * u), u) == Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(l2_error(sys.M, u, Vec::Zero(u.size())), DomainError);
}

TEST_CASE("finite element solution converges to the series solution", "[modes][convergence]") {
  const double k = 5.5;
  const auto exact = cavity_exact_solution(k);
  // The series satisfies the boundary condition and the PDE at a sample point.
  const double eps = 1e-3;
  const Point c{0.37, 0.61};
  auto ev = [&](double x, double y) { return exact({x, y}).real(); };
  const double lap = (ev(c.x + eps, c.y) + ev(c.x - eps, c.y) + ev(c.x, c.y + eps) +
                      ev(c.x, c.y - eps) - 4 * ev(c.x, c.y)) / (eps * eps);
  CHECK(-lap - k * k * ev(c.x, c.y) == Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(ev(0.0, 0.4)) < 1e-12);
  CHECK(std::abs(ev(0.3, 1.0)) < 1e-12);

  std::vector<double> err;
  for (double h : {1.0 / 8, 1.0 / 16}) {
    auto s = cavity_space(h, 2);
    auto sys = assemble_cavity(s, k);
    const Vec u = lu_factor(sys.A).solve(sys.b);
    err.push_back(l2_error(*s, s->expand(u), exact));
  }
  CHECK(err[1] < err[0] / 6.0);
  CHECK(err[1] < 1e-3);
}

TEST_CASE("PML assembly", "[assembly][pml]") {
  ScatterGeometry g;
  g.h = 0.1;
  auto mesh = std::make_shared<Mesh>(build_mesh_scatter(g));
  auto s = std::make_shared<FeSpace>(mesh, 2);
  PmlProfile off{g.L, g.L_pml, 20.0, false};
  auto std_m = assemble_matrices(*s);
  auto off_m = assemble_matrices(*s, &off);
  CHECK(add(1.0, std_m.K, -1.0, off_m.K).compress().nnz() == 0);
  CHECK(add(1.0, std_m.M, -1.0, off_m.M).compress().nnz() == 0);

  PmlProfile on{g.L, g.L_pml, 20.0, true};
  CHECK(on.gamma(0.5) == cplx(1.0));
  CHECK(on.gamma(0.9).imag() > 0.0);
  CHECK(on.sigma(g.L + g.L_pml - 1e-9) > 1e8);
  auto pml_m = assemble_matrices(*s, &on);
  const DenseMatrix kd = pml_m.K.to_dense();
  CHECK((kd - kd.transpose()).norm() < 1e-12 * kd.norm());
  CHECK(kd.imag().norm() > 0.0);

  const double k = 20.0;
  CHECK_THROWS_AS(assemble(s, k, ProblemData{Benchmark::Scatter}), ConfigError);
  auto sys = assemble_scatter(s, k, g, 0.4 * kPi);
  auto full_on = assemble_matrices(*s, &on);
  const auto& fr = s->free_dofs();
  CHECK(add(1.0, sys.A, -1.0, add(1.0, full_on.K, -k * k, full_on.M).select(fr, fr)).compress(1e-12).nnz() == 0);
}

TEST_CASE("Neumann load integrates the incident flux", "[assembly][pml]") {
  // Σ_i b_i = −∫_Γ ∂_n u_inc = −k² ∫_O u_inc by the divergence theorem, with
  // n pointing into the obstacle O.
  ScatterGeometry g;
  g.h = 0.1;
  auto s = std::make_shared<FeSpace>(std::make_shared<Mesh>(build_mesh_scatter(g)), 3);
  const double k = 7.5, theta = 0.4 * kPi;
  auto sys = assemble_scatter(s, k, g, theta);
  cplx total = 0.0;
  for (Index i = 0; i < s->ndof_free(); ++i) total += sys.b[static_cast<Eigen::Index>(i)];

  const double a = k * std::cos(theta), b = k * std::sin(theta);
  auto box = [&](double x0, double x1, double y0, double y1) {
    const cplx ix = (std::exp(I_unit * a * x1) - std::exp(I_unit * a * x0)) / (I_unit * a);
    const cplx iy = (std::exp(I_unit * b * y1) - std::exp(I_unit * b * y0)) / (I_unit * b);
    return ix * iy;
  };
  const double x0 = g.opening_x(), xb = g.back_x(), x1 = xb + g.wall_t;
  const double yi = g.l_O / 2, yo = yi + g.wall_t;
  const cplx solid = box(x0, x1, -yo, yo) - box(x0, xb, -yi, yi);
  CHECK(std::abs(total - (-k * k * solid)) < 1e-8 * std::abs(k * k * solid));
}

TEST_CASE("default scattering discretization size", "[assembly][pml]") {
  ScatterGeometry g;
  auto s = FeSpace(std::make_shared<Mesh>(build_mesh_scatter(g)), 3);
  CHECK(s.ndof_free() > 12000);
  CHECK(s.ndof_free() < 15000);
}

TEST_CASE("mesh export", "[mesh]") {
  auto m = build_mesh_cavity(0.5);
  const auto path = std::filesystem::temp_directory_path() / "hk_mesh.txt";
  m.write(path.string());
  std::ifstream is(path);
  std::string first;
  std::getline(is, first);
  CHECK(first.rfind("# mesh", 0) == 0);
  std::string word;
  Index n = 0;
  is >> word >> n;
  CHECK(word == "vertices");
  CHECK(n == 9);
  std::filesystem::remove(path);
}
