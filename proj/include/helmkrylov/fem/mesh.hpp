#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "helmkrylov/linalg/types.hpp"

namespace hk {

enum class BoundaryTag { Dirichlet, Neumann, Robin, Exterior, ObstacleWall };
enum class RegionTag { Interior, PmlX, PmlY, PmlXY };

const char* to_string(BoundaryTag tag);
const char* to_string(RegionTag tag);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct BoundaryEdge {
  Index a = 0;
  Index b = 0;
  BoundaryTag tag = BoundaryTag::Dirichlet;
};

/// Conforming triangulation with per-edge boundary tags and per-triangle
/// region tags. Immutable after construction; the constructor builds the
/// edge numbering and checks the invariants.
class Mesh {
 public:
  Mesh(std::vector<Point> vertices, std::vector<std::array<Index, 3>> triangles,
       std::vector<RegionTag> regions, std::vector<BoundaryEdge> boundary,
       std::string id);

  const std::string& id() const { return id_; }
  Index num_vertices() const { return vertices_.size(); }
  Index num_triangles() const { return triangles_.size(); }
  Index num_edges() const { return edges_.size(); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<Index, 3>>& triangles() const { return triangles_; }
  const std::vector<RegionTag>& regions() const { return regions_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }

  /// Edge endpoints with the lower vertex index first.
  const std::vector<std::array<Index, 2>>& edges() const { return edges_; }
  /// Global edge ids of the local edges (v0v1, v1v2, v2v0) of triangle t.
  const std::array<Index, 3>& triangle_edges(Index t) const { return tri_edges_[t]; }
  /// Triangle adjacent to boundary edge `e` (index into boundary_edges()).
  Index boundary_triangle(Index e) const { return boundary_tri_[e]; }

  double area(Index t) const;
  Point centroid(Index t) const;
  /// Index of the triangle whose centroid is nearest `p`.
  Index locate(Point p) const;

  /// Number of boundary edges carrying `tag`.
  Index count_boundary(BoundaryTag tag) const;

  /// Plain-text export: vertex list, triangles with region tags, boundary
  /// edges with tags.
  void write(const std::string& path) const;

 private:
  std::string id_;
  std::vector<Point> vertices_;
  std::vector<std::array<Index, 3>> triangles_;
  std::vector<RegionTag> regions_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<std::array<Index, 2>> edges_;
  std::vector<std::array<Index, 3>> tri_edges_;
  std::vector<Index> boundary_tri_;
};

/// How each grid square is split into two triangles.
enum class DiagonalPattern {
  /// Every square split along the same diagonal.
  Uniform,
  /// Diagonal direction alternates from one grid row to the next.
  AlternatingRows,
  /// Direction drawn per square from a fixed hash of its position.
  Random,
};

DiagonalPattern diagonal_pattern_from_string(const std::string& name);
const char* to_string(DiagonalPattern p);

/// Structured triangulation of the unit square; every boundary edge is tagged
/// Dirichlet. Requires 1/h integral and h ≤ 1/2.
Mesh build_mesh_cavity(double h, DiagonalPattern pattern = DiagonalPattern::Uniform);

enum class ObstacleBc { Neumann, Dirichlet };
const char* to_string(ObstacleBc bc);

/// Open rectangular cavity inside a PML-terminated square.
///
/// The cavity interior spans [x_open, x_open + L_O] × [−l_O/2, l_O/2] and is
/// open on its left side; walls of thickness wall_t close the top, bottom and
/// right. When `x_open` is unset the outer obstacle box is centred on the
/// origin.
struct ScatterGeometry {
  double L = 0.8;
  double L_pml = 0.2;
  double L_O = 1.3;
  double l_O = 0.4;
  double wall_t = 0.1;
  double h = 1.0 / 20.0;
  std::optional<double> x_open;
  ObstacleBc bc = ObstacleBc::Neumann;
  DiagonalPattern pattern = DiagonalPattern::Uniform;

  double opening_x() const { return x_open ? *x_open : -(L_O + wall_t) / 2.0; }
  double back_x() const { return opening_x() + L_O; }
  /// Perimeter of the obstacle's boundary seen from the fluid.
  double obstacle_perimeter() const { return 4.0 * L_O + 2.0 * l_O + 6.0 * wall_t; }
  /// Whether `p` lies inside the cavity interior (closed rectangle).
  bool in_cavity(Point p, double slack = 1e-12) const;
  /// Whether `p` lies strictly inside the solid walls.
  bool in_wall(Point p) const;
};

Mesh build_mesh_scatter(const ScatterGeometry& geom);

}  // namespace hk
