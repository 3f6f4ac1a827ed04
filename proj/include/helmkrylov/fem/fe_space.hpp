#pragma once

#include <memory>
#include <set>
#include <vector>

#include "helmkrylov/fem/mesh.hpp"

namespace hk {

/// Lagrange element of degree 1–3 on the reference triangle (0,0), (1,0),
/// (0,1). Local node order: the three vertices, then the points of edges
/// v0→v1, v1→v2, v2→v0 (each running from its first vertex), then interior
/// points.
class LagrangeElement {
 public:
  explicit LagrangeElement(int degree);

  int degree() const { return degree_; }
  Index num_nodes() const { return nodes_.size(); }
  const std::vector<Point>& nodes() const { return nodes_; }

  /// Basis values at reference point (x, y).
  Eigen::VectorXd values(double x, double y) const;
  /// Reference gradients, one row per basis function.
  Eigen::MatrixX2d gradients(double x, double y) const;

 private:
  int degree_;
  std::vector<Point> nodes_;
  std::vector<std::array<int, 2>> monomials_;
  /// Column j holds the monomial coefficients of basis function j.
  Eigen::MatrixXd coeffs_;
};

/// Continuous Lagrange space on a mesh with a free / Dirichlet dof split.
///
/// Global dof order: vertices, then (degree − 1) points per edge ordered from
/// the lower to the higher vertex index, then interior points per triangle.
/// Free dofs are numbered in global order skipping Dirichlet dofs.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, int degree,
          std::set<BoundaryTag> dirichlet_tags = {BoundaryTag::Dirichlet,
                                                  BoundaryTag::Exterior});

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  int degree() const { return element_.degree(); }
  const LagrangeElement& element() const { return element_; }

  Index ndof() const { return coords_.size(); }
  Index ndof_free() const { return free_.size(); }
  Index ndof_dirichlet() const { return dirichlet_.size(); }

  const std::vector<Point>& dof_coords() const { return coords_; }
  /// Global dofs of triangle t in local node order.
  std::vector<Index> element_dofs(Index t) const;
  /// Global dofs lying on boundary edge e (both endpoints and edge points).
  std::vector<Index> boundary_edge_dofs(Index e) const;

  bool is_dirichlet(Index g) const { return is_dirichlet_[g] != 0; }
  const std::vector<Index>& free_dofs() const { return free_; }
  const std::vector<Index>& dirichlet_dofs() const { return dirichlet_; }
  /// Position of global dof g among the free (resp. Dirichlet) dofs, or
  /// npos.
  Index free_index(Index g) const { return local_index_[g] < 0 ? npos : static_cast<Index>(local_index_[g]); }
  Index dirichlet_index(Index g) const { return local_index_[g] >= 0 ? npos : static_cast<Index>(-local_index_[g] - 1); }

  /// Expands a free-dof vector to all dofs with the given Dirichlet values
  /// (zero when empty).
  Vec expand(const Vec& free_values, const Vec& dirichlet_values = {}) const;

  static constexpr Index npos = static_cast<Index>(-1);

 private:
  std::shared_ptr<const Mesh> mesh_;
  LagrangeElement element_;
  std::vector<Point> coords_;
  std::vector<char> is_dirichlet_;
  std::vector<long> local_index_;
  std::vector<Index> free_;
  std::vector<Index> dirichlet_;
};

}  // namespace hk
