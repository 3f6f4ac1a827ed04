#include "helmkrylov/fem/assembly.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "helmkrylov/fem/quadrature.hpp"

namespace hk {

double PmlProfile::sigma(double s) const {
  if (!active || std::abs(s) <= L) return 0.0;
  return 1.0 / (L_pml - std::abs(s) + L);
}

const char* to_string(Benchmark b) { return b == Benchmark::Cavity ? "cavity" : "scatter"; }

Benchmark benchmark_from_string(const std::string& name) {
  if (name == "cavity") return Benchmark::Cavity;
  if (name == "scatter") return Benchmark::Scatter;
  throw ConfigError("unknown benchmark '" + name + "'");
}

cplx plane_wave(double k, double theta, Point p) {
  return std::exp(I_unit * k * (std::cos(theta) * p.x + std::sin(theta) * p.y));
}

namespace {

struct ElementGeometry {
  Point origin;
  Eigen::Matrix2d jac;
  Eigen::Matrix2d jac_inv_t;
  double det = 0.0;

  Point map(double x, double y) const {
    return {origin.x + jac(0, 0) * x + jac(0, 1) * y, origin.y + jac(1, 0) * x + jac(1, 1) * y};
  }
};

ElementGeometry geometry(const Mesh& m, Index t) {
  const auto& tri = m.triangles()[t];
  const Point& a = m.vertices()[tri[0]];
  const Point& b = m.vertices()[tri[1]];
  const Point& c = m.vertices()[tri[2]];
  ElementGeometry g;
  g.origin = a;
  g.jac << b.x - a.x, c.x - a.x, b.y - a.y, c.y - a.y;
  g.det = g.jac.determinant();
  g.jac_inv_t = g.jac.inverse().transpose();
  return g;
}

// Reference coordinates of parameter s ∈ [0,1] along local edge le.
Point edge_point(int le, double s) {
  switch (le) {
    case 0: return {s, 0.0};
    case 1: return {1.0 - s, s};
    default: return {0.0, 1.0 - s};
  }
}

struct BoundaryQuad {
  std::vector<Index> dofs;
  std::vector<Eigen::VectorXd> phi;
  std::vector<Point> points;
  std::vector<double> weights;
  Eigen::Vector2d normal;
};

BoundaryQuad boundary_quadrature(const FeSpace& space, Index e, int degree) {
  const Mesh& m = space.mesh();
  const auto& be = m.boundary_edges()[e];
  const Index t = m.boundary_triangle(e);
  const auto& tri = m.triangles()[t];
  int le = 0;
  for (; le < 3; ++le) {
    const Index a = tri[static_cast<std::size_t>(le)];
    const Index b = tri[static_cast<std::size_t>((le + 1) % 3)];
    if ((a == be.a && b == be.b) || (a == be.b && b == be.a)) break;
  }
  const Point& p = m.vertices()[tri[static_cast<std::size_t>(le)]];
  const Point& q = m.vertices()[tri[static_cast<std::size_t>((le + 1) % 3)]];
  const double len = std::hypot(q.x - p.x, q.y - p.y);
  const ElementGeometry g = geometry(m, t);
  BoundaryQuad out;
  out.dofs = space.element_dofs(t);
  out.normal = Eigen::Vector2d(q.y - p.y, -(q.x - p.x)) / len;
  for (const auto& qp : gauss_legendre_01(degree / 2 + 1)) {
    const Point r = edge_point(le, qp.x);
    out.phi.push_back(space.element().values(r.x, r.y));
    out.points.push_back(g.map(r.x, r.y));
    out.weights.push_back(qp.w * len);
  }
  return out;
}

}  // namespace

FullMatrices assemble_matrices(const FeSpace& space, const PmlProfile* pml) {
  const Mesh& m = space.mesh();
  const LagrangeElement& el = space.element();
  const Index nb = el.num_nodes();
  const int p = space.degree();

  struct RefData {
    std::vector<QuadPoint> rule;
    std::vector<Eigen::VectorXd> phi;
    std::vector<Eigen::MatrixX2d> grad;
  };
  auto make_ref = [&](int degree) {
    RefData r;
    r.rule = triangle_rule(degree);
    for (const auto& q : r.rule) {
      r.phi.push_back(el.values(q.x, q.y));
      r.grad.push_back(el.gradients(q.x, q.y));
    }
    return r;
  };
  const RefData plain = make_ref(2 * p);
  const RefData stretched = make_ref(2 * p + 2);

  std::vector<Triplet> kt, mt, bt;
  kt.reserve(m.num_triangles() * nb * nb);
  mt.reserve(m.num_triangles() * nb * nb);
  const Eigen::Index n = static_cast<Eigen::Index>(nb);
  DenseMatrix ke(n, n), me(n, n);
  for (Index t = 0; t < m.num_triangles(); ++t) {
    const ElementGeometry g = geometry(m, t);
    const bool in_pml = pml != nullptr && pml->active && m.regions()[t] != RegionTag::Interior;
    const RefData& ref = in_pml ? stretched : plain;
    ke.setZero();
    me.setZero();
    for (std::size_t q = 0; q < ref.rule.size(); ++q) {
      const double w = ref.rule[q].w * std::abs(g.det);
      const Eigen::MatrixX2d grad = ref.grad[q] * g.jac_inv_t.transpose();
      const Eigen::VectorXd& phi = ref.phi[q];
      cplx cx = 1.0, cy = 1.0, cm = 1.0;
      if (in_pml) {
        const Point x = g.map(ref.rule[q].x, ref.rule[q].y);
        const cplx gx = pml->gamma(x.x);
        const cplx gy = pml->gamma(x.y);
        cx = gy / gx;
        cy = gx / gy;
        cm = gx * gy;
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          ke(i, j) += w * (cx * (grad(i, 0) * grad(j, 0)) + cy * (grad(i, 1) * grad(j, 1)));
          me(i, j) += w * cm * (phi[i] * phi[j]);
        }
      }
    }
    const auto dofs = space.element_dofs(t);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        kt.push_back({dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)], ke(i, j)});
        mt.push_back({dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)], me(i, j)});
      }
    }
  }

  for (Index e = 0; e < m.boundary_edges().size(); ++e) {
    if (m.boundary_edges()[e].tag != BoundaryTag::Robin) continue;
    const BoundaryQuad bq = boundary_quadrature(space, e, 2 * p);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        double v = 0.0;
        for (std::size_t q = 0; q < bq.weights.size(); ++q) v += bq.weights[q] * bq.phi[q][i] * bq.phi[q][j];
        if (v != 0.0) bt.push_back({bq.dofs[static_cast<std::size_t>(i)], bq.dofs[static_cast<std::size_t>(j)], v});
      }
    }
  }

  const Index nd = space.ndof();
  return {SparseMatrix::from_triplets(nd, nd, std::move(kt)),
          SparseMatrix::from_triplets(nd, nd, std::move(mt)),
          SparseMatrix::from_triplets(nd, nd, std::move(bt))};
}

LinearSystem assemble(std::shared_ptr<const FeSpace> space_ptr, double k, const ProblemData& data) {
  if (!space_ptr) throw Error("assemble: null space");
  if (!(k > 0.0)) throw DomainError("assemble: wavenumber must be positive");
  const FeSpace& space = *space_ptr;
  const Mesh& m = space.mesh();
  if (data.kind == Benchmark::Scatter && !data.pml) {
    throw ConfigError("assemble: the scattering problem needs a PML profile");
  }
  std::optional<PmlProfile> pml = data.pml;
  if (pml) pml->k = k;

  const FullMatrices full = assemble_matrices(space, pml ? &*pml : nullptr);
  const cplx k2 = k * k;
  const SparseMatrix a_full = add(1.0, add(1.0, full.K, -k2, full.M), I_unit * k, full.B);

  const Index nd = space.ndof();
  const int p = space.degree();
  Vec load = Vec::Zero(static_cast<Eigen::Index>(nd));

  if (data.source) {
    const auto& rule = triangle_rule(2 * p + 2);
    for (Index t = 0; t < m.num_triangles(); ++t) {
      const ElementGeometry g = geometry(m, t);
      const auto dofs = space.element_dofs(t);
      for (const auto& q : rule) {
        const Eigen::VectorXd phi = space.element().values(q.x, q.y);
        const cplx f = data.source(g.map(q.x, q.y)) * (q.w * std::abs(g.det));
        for (Eigen::Index i = 0; i < phi.size(); ++i) load[static_cast<Eigen::Index>(dofs[static_cast<std::size_t>(i)])] += f * phi[i];
      }
    }
  }

  Vec uhat = Vec::Zero(static_cast<Eigen::Index>(space.ndof_dirichlet()));
  if (data.kind == Benchmark::Scatter) {
    for (Index e = 0; e < m.boundary_edges().size(); ++e) {
      const BoundaryTag tag = m.boundary_edges()[e].tag;
      if (tag == BoundaryTag::Neumann && data.obstacle_bc == ObstacleBc::Neumann) {
        const BoundaryQuad bq = boundary_quadrature(space, e, 2 * p + 4);
        const double c = std::cos(data.theta), s = std::sin(data.theta);
        for (std::size_t q = 0; q < bq.weights.size(); ++q) {
          const cplx dn = I_unit * k * (c * bq.normal[0] + s * bq.normal[1]) *
                          plane_wave(k, data.theta, bq.points[q]);
          const cplx gn = -dn * bq.weights[q];
          for (Eigen::Index i = 0; i < bq.phi[q].size(); ++i) {
            load[static_cast<Eigen::Index>(bq.dofs[static_cast<std::size_t>(i)])] += gn * bq.phi[q][i];
          }
        }
      }
      if (tag == BoundaryTag::Dirichlet && data.obstacle_bc == ObstacleBc::Dirichlet) {
        for (Index g : space.boundary_edge_dofs(e)) {
          const Index d = space.dirichlet_index(g);
          if (d != FeSpace::npos) uhat[static_cast<Eigen::Index>(d)] = -plane_wave(k, data.theta, space.dof_coords()[g]);
        }
      }
    }
  }

  LinearSystem sys;
  const auto& fr = space.free_dofs();
  const auto& dr = space.dirichlet_dofs();
  sys.K = full.K.select(fr, fr);
  sys.M = full.M.select(fr, fr);
  sys.B = full.B.select(fr, fr);
  sys.A = a_full.select(fr, fr);
  sys.b.resize(static_cast<Eigen::Index>(fr.size()));
  for (Index i = 0; i < fr.size(); ++i) sys.b[static_cast<Eigen::Index>(i)] = load[static_cast<Eigen::Index>(fr[i])];
  if (uhat.size() > 0 && uhat.cwiseAbs().maxCoeff() > 0.0) {
    sys.b -= a_full.select(fr, dr).multiply(uhat);
  }
  sys.dirichlet_values = std::move(uhat);
  sys.k = k;
  sys.space = std::move(space_ptr);
  std::ostringstream meta;
  meta << to_string(data.kind) << " mesh=" << m.id() << " P" << p << " k=" << k;
  if (data.kind == Benchmark::Scatter) meta << " bc=" << to_string(data.obstacle_bc);
  sys.meta = meta.str();
  return sys;
}

LinearSystem assemble_cavity(std::shared_ptr<const FeSpace> space, double k) {
  ProblemData d;
  d.kind = Benchmark::Cavity;
  d.source = [](Point) { return cplx(1.0); };
  return assemble(std::move(space), k, d);
}

LinearSystem assemble_scatter(std::shared_ptr<const FeSpace> space, double k,
                              const ScatterGeometry& geom, double theta) {
  ProblemData d;
  d.kind = Benchmark::Scatter;
  d.theta = theta;
  d.obstacle_bc = geom.bc;
  d.pml = PmlProfile{geom.L, geom.L_pml, k, true};
  return assemble(std::move(space), k, d);
}

}  // namespace hk
