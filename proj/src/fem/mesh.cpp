#include "helmkrylov/fem/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace hk {

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Dirichlet: return "dirichlet";
    case BoundaryTag::Neumann: return "neumann";
    case BoundaryTag::Robin: return "robin";
    case BoundaryTag::Exterior: return "exterior";
    case BoundaryTag::ObstacleWall: return "obstacle_wall";
  }
  return "?";
}

const char* to_string(RegionTag tag) {
  switch (tag) {
    case RegionTag::Interior: return "interior";
    case RegionTag::PmlX: return "pml_x";
    case RegionTag::PmlY: return "pml_y";
    case RegionTag::PmlXY: return "pml_xy";
  }
  return "?";
}

const char* to_string(DiagonalPattern p) {
  switch (p) {
    case DiagonalPattern::Uniform: return "uniform";
    case DiagonalPattern::AlternatingRows: return "alternating_rows";
    case DiagonalPattern::Random: return "random";
  }
  return "?";
}

DiagonalPattern diagonal_pattern_from_string(const std::string& name) {
  if (name == "uniform") return DiagonalPattern::Uniform;
  if (name == "alternating_rows" || name == "alternating") return DiagonalPattern::AlternatingRows;
  if (name == "random") return DiagonalPattern::Random;
  throw ConfigError("unknown diagonal pattern '" + name + "'");
}

const char* to_string(ObstacleBc bc) {
  return bc == ObstacleBc::Neumann ? "neumann" : "dirichlet";
}

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<Index, 3>> triangles,
           std::vector<RegionTag> regions, std::vector<BoundaryEdge> boundary,
           std::string id)
    : id_(std::move(id)),
      vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      regions_(std::move(regions)),
      boundary_(std::move(boundary)) {
  const Index nt = triangles_.size();
  if (regions_.size() != nt) throw DimensionError("mesh: one region tag per triangle required");

  std::map<std::array<Index, 2>, Index> edge_id;
  std::vector<Index> edge_count;
  tri_edges_.resize(nt);
  for (Index t = 0; t < nt; ++t) {
    const auto& tri = triangles_[t];
    for (Index v : tri) {
      if (v >= vertices_.size()) throw Error("mesh: triangle references a missing vertex");
    }
    if (!(area(t) > 0.0)) {
      std::ostringstream os;
      os << "mesh: triangle " << t << " is not positively oriented";
      throw Error(os.str());
    }
    for (int e = 0; e < 3; ++e) {
      Index a = tri[static_cast<std::size_t>(e)];
      Index b = tri[static_cast<std::size_t>((e + 1) % 3)];
      std::array<Index, 2> key{std::min(a, b), std::max(a, b)};
      auto [it, inserted] = edge_id.try_emplace(key, edges_.size());
      if (inserted) {
        edges_.push_back(key);
        edge_count.push_back(0);
      }
      ++edge_count[it->second];
      tri_edges_[t][static_cast<std::size_t>(e)] = it->second;
    }
  }

  std::vector<Index> edge_tri(edges_.size(), 0);
  for (Index t = 0; t < nt; ++t) {
    for (Index e : tri_edges_[t]) edge_tri[e] = t;
  }

  std::vector<int> tagged(edges_.size(), 0);
  boundary_tri_.reserve(boundary_.size());
  for (const auto& be : boundary_) {
    auto it = edge_id.find({std::min(be.a, be.b), std::max(be.a, be.b)});
    if (it == edge_id.end()) throw Error("mesh: tagged boundary edge is not a mesh edge");
    if (edge_count[it->second] != 1) throw Error("mesh: tagged edge is interior");
    ++tagged[it->second];
    boundary_tri_.push_back(edge_tri[it->second]);
  }
  for (Index e = 0; e < edges_.size(); ++e) {
    if (edge_count[e] > 2) throw Error("mesh: edge shared by more than two triangles");
    if (edge_count[e] == 1 && tagged[e] != 1) {
      std::ostringstream os;
      os << "mesh: boundary edge (" << edges_[e][0] << ", " << edges_[e][1] << ") carries "
         << tagged[e] << " tags";
      throw Error(os.str());
    }
  }
}

double Mesh::area(Index t) const {
  const auto& tri = triangles_[t];
  const Point& a = vertices_[tri[0]];
  const Point& b = vertices_[tri[1]];
  const Point& c = vertices_[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Point Mesh::centroid(Index t) const {
  const auto& tri = triangles_[t];
  Point p;
  for (Index v : tri) {
    p.x += vertices_[v].x / 3.0;
    p.y += vertices_[v].y / 3.0;
  }
  return p;
}

Index Mesh::locate(Point p) const {
  Index best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (Index t = 0; t < num_triangles(); ++t) {
    const Point c = centroid(t);
    const double d = std::hypot(c.x - p.x, c.y - p.y);
    if (d < dist) {
      dist = d;
      best = t;
    }
  }
  return best;
}

Index Mesh::count_boundary(BoundaryTag tag) const {
  return static_cast<Index>(std::count_if(boundary_.begin(), boundary_.end(),
                                          [&](const BoundaryEdge& e) { return e.tag == tag; }));
}

void Mesh::write(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  os.precision(17);
  os << "# mesh " << id_ << "\n";
  os << "vertices " << vertices_.size() << "\n";
  for (const auto& p : vertices_) os << p.x << ' ' << p.y << "\n";
  os << "triangles " << triangles_.size() << "\n";
  for (Index t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << to_string(regions_[t]) << "\n";
  }
  os << "boundary_edges " << boundary_.size() << "\n";
  for (const auto& e : boundary_) os << e.a << ' ' << e.b << ' ' << to_string(e.tag) << "\n";
}

namespace {

Index integral_cells(double extent, double h, const char* what) {
  const double n = extent / h;
  const double r = std::round(n);
  if (r < 1.0 || std::abs(n - r) > 1e-9 * std::max(1.0, r)) {
    std::ostringstream os;
    os << what << " (" << extent << ") is not a whole number of cells of size h = " << h;
    throw DomainError(os.str());
  }
  return static_cast<Index>(r);
}

// Splits the square with lower-left vertex a, corners b (right), c (upper
// right), d (up) into two counter-clockwise triangles.
void split_square(Index a, Index b, Index c, Index d, bool slash,
                  std::vector<std::array<Index, 3>>& tris) {
  if (slash) {
    tris.push_back({a, b, c});
    tris.push_back({a, c, d});
  } else {
    tris.push_back({a, b, d});
    tris.push_back({b, c, d});
  }
}

bool slash_for_cell(DiagonalPattern p, Index col, Index row) {
  switch (p) {
    case DiagonalPattern::Uniform: return true;
    case DiagonalPattern::AlternatingRows: return row % 2 == 0;
    case DiagonalPattern::Random: {
      // splitmix64 of the cell position: reproducible without shared state.
      std::uint64_t z = (static_cast<std::uint64_t>(row) << 32) + col + 0x9e3779b97f4a7c15ULL;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      z ^= z >> 31;
      return (z & 1U) != 0;
    }
  }
  return true;
}

}  // namespace

Mesh build_mesh_cavity(double h, DiagonalPattern pattern) {
  if (!(h > 0.0) || h > 0.5) throw DomainError("cavity mesh: need 0 < h <= 1/2");
  const Index n = integral_cells(1.0, h, "1/h");
  const Index nv = n + 1;
  std::vector<Point> verts;
  verts.reserve(nv * nv);
  for (Index j = 0; j < nv; ++j) {
    for (Index i = 0; i < nv; ++i) {
      verts.push_back({static_cast<double>(i) / static_cast<double>(n),
                       static_cast<double>(j) / static_cast<double>(n)});
    }
  }
  auto vid = [&](Index i, Index j) { return j * nv + i; };
  std::vector<std::array<Index, 3>> tris;
  tris.reserve(2 * n * n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      split_square(vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1),
                   slash_for_cell(pattern, i, j), tris);
    }
  }
  std::vector<BoundaryEdge> bnd;
  for (Index i = 0; i < n; ++i) {
    bnd.push_back({vid(i, 0), vid(i + 1, 0), BoundaryTag::Dirichlet});
    bnd.push_back({vid(n, i), vid(n, i + 1), BoundaryTag::Dirichlet});
    bnd.push_back({vid(i + 1, n), vid(i, n), BoundaryTag::Dirichlet});
    bnd.push_back({vid(0, i + 1), vid(0, i), BoundaryTag::Dirichlet});
  }
  std::vector<RegionTag> regions(tris.size(), RegionTag::Interior);
  std::ostringstream id;
  id << "cavity_n" << n << "_" << to_string(pattern);
  return Mesh(std::move(verts), std::move(tris), std::move(regions), std::move(bnd), id.str());
}

bool ScatterGeometry::in_cavity(Point p, double slack) const {
  return p.x >= opening_x() - slack && p.x <= back_x() + slack &&
         std::abs(p.y) <= l_O / 2.0 + slack;
}

bool ScatterGeometry::in_wall(Point p) const {
  const double x0 = opening_x();
  const double x1 = back_x() + wall_t;
  const double y1 = l_O / 2.0 + wall_t;
  const bool in_box = p.x > x0 && p.x < x1 && std::abs(p.y) < y1;
  const bool in_hollow = p.x < back_x() && std::abs(p.y) < l_O / 2.0;
  return in_box && !in_hollow;
}

Mesh build_mesh_scatter(const ScatterGeometry& g) {
  if (!(g.h > 0.0) || !(g.L > 0.0) || !(g.L_pml > 0.0) || !(g.L_O > 0.0) ||
      !(g.l_O > 0.0) || !(g.wall_t > 0.0)) {
    throw DomainError("scatter mesh: all lengths must be positive");
  }
  const double R = g.L + g.L_pml;
  const Index n = integral_cells(2.0 * R, g.h, "domain width 2(L + L_pml)");
  integral_cells(g.L_pml, g.h, "PML thickness");
  integral_cells(g.L_O, g.h, "cavity length");
  integral_cells(g.l_O, g.h, "cavity opening");
  integral_cells(g.wall_t, g.h, "wall thickness");
  integral_cells(g.opening_x() + R, g.h, "opening position");
  integral_cells(R - g.l_O / 2.0 - g.wall_t, g.h, "obstacle top");

  const double x1 = g.back_x() + g.wall_t;
  const double y1 = g.l_O / 2.0 + g.wall_t;
  if (g.opening_x() <= -g.L || x1 >= g.L || y1 >= g.L) {
    throw DomainError("scatter mesh: obstacle touches the PML or leaves (-L, L)^2");
  }

  const Index nv = n + 1;
  auto coord = [&](Index i) { return -R + 2.0 * R * static_cast<double>(i) / static_cast<double>(n); };

  std::vector<char> keep(n * n, 0);
  std::vector<char> used(nv * nv, 0);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Point c{0.5 * (coord(i) + coord(i + 1)), 0.5 * (coord(j) + coord(j + 1))};
      if (!g.in_wall(c)) {
        keep[j * n + i] = 1;
        used[j * nv + i] = used[j * nv + i + 1] = used[(j + 1) * nv + i] =
            used[(j + 1) * nv + i + 1] = 1;
      }
    }
  }
  constexpr Index kNone = static_cast<Index>(-1);
  std::vector<Index> renum(nv * nv, kNone);
  std::vector<Point> verts;
  for (Index j = 0; j < nv; ++j) {
    for (Index i = 0; i < nv; ++i) {
      if (used[j * nv + i]) {
        renum[j * nv + i] = verts.size();
        verts.push_back({coord(i), coord(j)});
      }
    }
  }
  auto vid = [&](Index i, Index j) { return renum[j * nv + i]; };

  std::vector<std::array<Index, 3>> tris;
  std::vector<RegionTag> regions;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (!keep[j * n + i]) continue;
      split_square(vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1),
                   slash_for_cell(g.pattern, i, j), tris);
      const double cx = 0.5 * (coord(i) + coord(i + 1));
      const double cy = 0.5 * (coord(j) + coord(j + 1));
      const bool px = std::abs(cx) > g.L;
      const bool py = std::abs(cy) > g.L;
      const RegionTag r = px && py ? RegionTag::PmlXY
                          : px     ? RegionTag::PmlX
                          : py     ? RegionTag::PmlY
                                   : RegionTag::Interior;
      regions.push_back(r);
      regions.push_back(r);
    }
  }

  // Boundary edges are the cell sides between a kept cell and a removed cell
  // or the outside of the grid; they are oriented with the fluid on the left.
  const BoundaryTag obstacle_tag =
      g.bc == ObstacleBc::Neumann ? BoundaryTag::Neumann : BoundaryTag::Dirichlet;
  auto kept = [&](long i, long j) {
    return i >= 0 && j >= 0 && i < static_cast<long>(n) && j < static_cast<long>(n) &&
           keep[static_cast<Index>(j) * n + static_cast<Index>(i)];
  };
  std::vector<BoundaryEdge> bnd;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (!keep[j * n + i]) continue;
      const long li = static_cast<long>(i), lj = static_cast<long>(j);
      auto tag_for = [&](long ni, long nj) {
        const bool outside = ni < 0 || nj < 0 || ni >= static_cast<long>(n) || nj >= static_cast<long>(n);
        return outside ? BoundaryTag::Exterior : obstacle_tag;
      };
      if (!kept(li, lj - 1)) bnd.push_back({vid(i, j), vid(i + 1, j), tag_for(li, lj - 1)});
      if (!kept(li + 1, lj)) bnd.push_back({vid(i + 1, j), vid(i + 1, j + 1), tag_for(li + 1, lj)});
      if (!kept(li, lj + 1)) bnd.push_back({vid(i + 1, j + 1), vid(i, j + 1), tag_for(li, lj + 1)});
      if (!kept(li - 1, lj)) bnd.push_back({vid(i, j + 1), vid(i, j), tag_for(li - 1, lj)});
    }
  }

  std::ostringstream id;
  id << "scatter_n" << n << "_" << to_string(g.bc);
  return Mesh(std::move(verts), std::move(tris), std::move(regions), std::move(bnd), id.str());
}

}  // namespace hk
