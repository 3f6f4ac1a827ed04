#include "helmkrylov/fem/fe_space.hpp"

#include <cmath>

#include <Eigen/LU>

namespace hk {

LagrangeElement::LagrangeElement(int degree) : degree_(degree) {
  if (degree < 1 || degree > 3) throw DomainError("Lagrange degree must be 1, 2 or 3");
  const double p = degree;
  nodes_ = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  for (int i = 1; i < degree; ++i) nodes_.push_back({i / p, 0.0});
  for (int i = 1; i < degree; ++i) nodes_.push_back({1.0 - i / p, i / p});
  for (int i = 1; i < degree; ++i) nodes_.push_back({0.0, 1.0 - i / p});
  for (int j = 1; j < degree; ++j) {
    for (int i = 1; i + j < degree; ++i) nodes_.push_back({i / p, j / p});
  }
  for (int d = 0; d <= degree; ++d) {
    for (int b = 0; b <= d; ++b) monomials_.push_back({d - b, b});
  }
  const Eigen::Index n = static_cast<Eigen::Index>(nodes_.size());
  Eigen::MatrixXd v(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& m = monomials_[static_cast<std::size_t>(c)];
      v(r, c) = std::pow(nodes_[static_cast<std::size_t>(r)].x, m[0]) *
                std::pow(nodes_[static_cast<std::size_t>(r)].y, m[1]);
    }
  }
  coeffs_ = v.fullPivLu().inverse();
}

Eigen::VectorXd LagrangeElement::values(double x, double y) const {
  const Eigen::Index n = static_cast<Eigen::Index>(monomials_.size());
  Eigen::VectorXd mono(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& m = monomials_[static_cast<std::size_t>(c)];
    mono[c] = std::pow(x, m[0]) * std::pow(y, m[1]);
  }
  return coeffs_.transpose() * mono;
}

Eigen::MatrixX2d LagrangeElement::gradients(double x, double y) const {
  const Eigen::Index n = static_cast<Eigen::Index>(monomials_.size());
  Eigen::MatrixX2d dm(n, 2);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& m = monomials_[static_cast<std::size_t>(c)];
    dm(c, 0) = m[0] == 0 ? 0.0 : m[0] * std::pow(x, m[0] - 1) * std::pow(y, m[1]);
    dm(c, 1) = m[1] == 0 ? 0.0 : m[1] * std::pow(x, m[0]) * std::pow(y, m[1] - 1);
  }
  return coeffs_.transpose() * dm;
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, int degree,
                 std::set<BoundaryTag> dirichlet_tags)
    : mesh_(std::move(mesh)), element_(degree) {
  if (!mesh_) throw Error("FeSpace: null mesh");
  const Mesh& m = *mesh_;
  const Index per_edge = static_cast<Index>(degree - 1);
  const Index per_tri = static_cast<Index>((degree - 1) * (degree - 2) / 2);
  const Index total = m.num_vertices() + per_edge * m.num_edges() + per_tri * m.num_triangles();
  coords_.resize(total);

  for (Index v = 0; v < m.num_vertices(); ++v) coords_[v] = m.vertices()[v];
  const double p = degree;
  for (Index e = 0; e < m.num_edges(); ++e) {
    const Point& a = m.vertices()[m.edges()[e][0]];
    const Point& b = m.vertices()[m.edges()[e][1]];
    for (Index s = 0; s < per_edge; ++s) {
      const double t = static_cast<double>(s + 1) / p;
      coords_[m.num_vertices() + e * per_edge + s] = {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    }
  }
  const Index interior0 = m.num_vertices() + per_edge * m.num_edges();
  const auto& ref = element_.nodes();
  for (Index t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles()[t];
    const Point& a = m.vertices()[tri[0]];
    const Point& b = m.vertices()[tri[1]];
    const Point& c = m.vertices()[tri[2]];
    for (Index s = 0; s < per_tri; ++s) {
      const Point& r = ref[3 + 3 * per_edge + s];
      coords_[interior0 + t * per_tri + s] = {a.x + r.x * (b.x - a.x) + r.y * (c.x - a.x),
                                              a.y + r.x * (b.y - a.y) + r.y * (c.y - a.y)};
    }
  }

  is_dirichlet_.assign(total, 0);
  for (Index e = 0; e < m.boundary_edges().size(); ++e) {
    if (dirichlet_tags.count(m.boundary_edges()[e].tag) == 0) continue;
    for (Index g : boundary_edge_dofs(e)) is_dirichlet_[g] = 1;
  }
  local_index_.resize(total);
  for (Index g = 0; g < total; ++g) {
    if (is_dirichlet_[g]) {
      local_index_[g] = -static_cast<long>(dirichlet_.size()) - 1;
      dirichlet_.push_back(g);
    } else {
      local_index_[g] = static_cast<long>(free_.size());
      free_.push_back(g);
    }
  }
}

std::vector<Index> FeSpace::element_dofs(Index t) const {
  const Mesh& m = *mesh_;
  const Index per_edge = static_cast<Index>(degree() - 1);
  const Index per_tri = static_cast<Index>((degree() - 1) * (degree() - 2) / 2);
  const auto& tri = m.triangles()[t];
  std::vector<Index> dofs(tri.begin(), tri.end());
  dofs.reserve(element_.num_nodes());
  for (int le = 0; le < 3; ++le) {
    const Index e = m.triangle_edges(t)[static_cast<std::size_t>(le)];
    const bool forward = tri[static_cast<std::size_t>(le)] < tri[static_cast<std::size_t>((le + 1) % 3)];
    for (Index s = 0; s < per_edge; ++s) {
      const Index gs = forward ? s : per_edge - 1 - s;
      dofs.push_back(m.num_vertices() + e * per_edge + gs);
    }
  }
  const Index interior0 = m.num_vertices() + per_edge * m.num_edges();
  for (Index s = 0; s < per_tri; ++s) dofs.push_back(interior0 + t * per_tri + s);
  return dofs;
}

std::vector<Index> FeSpace::boundary_edge_dofs(Index e) const {
  const Mesh& m = *mesh_;
  const auto& be = m.boundary_edges()[e];
  const Index t = m.boundary_triangle(e);
  const auto& tri = m.triangles()[t];
  const auto dofs = element_dofs(t);
  const Index per_edge = static_cast<Index>(degree() - 1);
  for (int le = 0; le < 3; ++le) {
    const Index a = tri[static_cast<std::size_t>(le)];
    const Index b = tri[static_cast<std::size_t>((le + 1) % 3)];
    if ((a == be.a && b == be.b) || (a == be.b && b == be.a)) {
      std::vector<Index> out{a};
      for (Index s = 0; s < per_edge; ++s) out.push_back(dofs[3 + static_cast<Index>(le) * per_edge + s]);
      out.push_back(b);
      return out;
    }
  }
  throw Error("boundary edge not found in its triangle");
}

Vec FeSpace::expand(const Vec& free_values, const Vec& dirichlet_values) const {
  require_dims(static_cast<Index>(free_values.size()) == ndof_free(), "expand: free values");
  require_dims(dirichlet_values.size() == 0 ||
                   static_cast<Index>(dirichlet_values.size()) == ndof_dirichlet(),
               "expand: Dirichlet values");
  Vec full = Vec::Zero(static_cast<Eigen::Index>(ndof()));
  for (Index i = 0; i < free_.size(); ++i) full[static_cast<Eigen::Index>(free_[i])] = free_values[static_cast<Eigen::Index>(i)];
  if (dirichlet_values.size() != 0) {
    for (Index i = 0; i < dirichlet_.size(); ++i) {
      full[static_cast<Eigen::Index>(dirichlet_[i])] = dirichlet_values[static_cast<Eigen::Index>(i)];
    }
  }
  return full;
}

}  // namespace hk
