#pragma once

#include <vector>

#include "helmkrylov/fem/assembly.hpp"

namespace hk {

/// Lagrange interpolant of `f` restricted to the free dofs.
Vec project_mode(const FeSpace& space, const ScalarField& f);
/// Lagrange interpolant of `f` on all dofs.
Vec interpolate(const FeSpace& space, const ScalarField& f);

/// Dirichlet eigenmode sin(nπx) sin(mπy) of the unit square.
ScalarField cavity_mode(int n, int m);
double cavity_eigenvalue(int n, int m);

struct ModeIndex {
  int n = 1;
  int m = 1;
  bool operator==(const ModeIndex&) const = default;
};

/// Modes with π²(n² + m²) < k², nearest to k² first; (n, m) before (m, n).
std::vector<ModeIndex> negative_cavity_modes(double k);

/// Which side of the closed obstacle cavity carries the Dirichlet condition
/// in the approximate quasimodes; the other three sides are Neumann.
enum class DirichletSide { Opening, Back };
DirichletSide dirichlet_side_from_string(const std::string& name);

/// Closed-cavity mode cos(nπ(y + l_O/2)/l_O) · sin((m + ½)π ξ/L_O) where ξ is
/// the distance to the Dirichlet side, extended by zero outside the cavity.
ScalarField open_cavity_mode(const ScatterGeometry& geom, int n, int m,
                             DirichletSide side = DirichletSide::Opening);

/// Series solution of −Δu − k²u = 1 on the unit square with u = 0 on the
/// boundary, summed over odd sine indices up to `max_index`.
ScalarField cavity_exact_solution(double k, int max_index = 2001);

/// ‖u_h − u_ref‖_M / ‖u_ref‖_M for free-dof vectors and a mass matrix.
double l2_error(const SparseMatrix& mass, const Vec& uh, const Vec& uref);

/// Relative L² error of a finite element function (all dofs) against a
/// closed form, by quadrature of degree 2p + 4 on every triangle.
double l2_error(const FeSpace& space, const Vec& uh_full, const ScalarField& uref);

}  // namespace hk
