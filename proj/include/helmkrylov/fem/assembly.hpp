#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "helmkrylov/fem/fe_space.hpp"
#include "helmkrylov/linalg/sparse_matrix.hpp"

namespace hk {

using ScalarField = std::function<cplx(Point)>;

/// Hyperbolic PML profile σ(s) = 1/(L_pml − |s| + L) for |s| > L, with
/// stretching γ(s) = 1 + iσ(s)/k.
struct PmlProfile {
  double L = 0.8;
  double L_pml = 0.2;
  double k = 1.0;
  /// When false σ ≡ 0 (plain Helmholtz on the whole box).
  bool active = true;

  double sigma(double s) const;
  cplx gamma(double s) const { return 1.0 + I_unit * sigma(s) / k; }
};

enum class Benchmark { Cavity, Scatter };
const char* to_string(Benchmark b);
Benchmark benchmark_from_string(const std::string& name);

/// Data of the boundary value problem beyond the space and the wavenumber.
struct ProblemData {
  Benchmark kind = Benchmark::Cavity;
  /// Volume source f (cavity); empty means f ≡ 0.
  ScalarField source;
  /// Incident plane wave e^{ik(cos θ x + sin θ y)} (scatter).
  double theta = 0.4 * 3.14159265358979323846;
  ObstacleBc obstacle_bc = ObstacleBc::Neumann;
  std::optional<PmlProfile> pml;
};

/// Matrices over all dofs (no boundary condition applied).
struct FullMatrices {
  SparseMatrix K;
  SparseMatrix M;
  SparseMatrix B;
};

/// Discrete system restricted to free dofs.
struct LinearSystem {
  SparseMatrix A;
  Vec b;
  SparseMatrix K;
  SparseMatrix M;
  SparseMatrix B;
  /// Values û imposed on the Dirichlet dofs.
  Vec dirichlet_values;
  double k = 0.0;
  std::string meta;
  std::shared_ptr<const FeSpace> space;

  Index size() const { return A.rows(); }
};

/// Stiffness, mass and Robin boundary mass over all dofs. With a PML profile
/// K and M are the γ-weighted forms ∫(γ_y/γ_x)∂xφ∂xψ + (γ_x/γ_y)∂yφ∂yψ and
/// ∫γ_xγ_y φψ.
FullMatrices assemble_matrices(const FeSpace& space, const PmlProfile* pml = nullptr);

/// Assembles A = K − k²M + ikB and b including the Dirichlet lift.
LinearSystem assemble(std::shared_ptr<const FeSpace> space, double k, const ProblemData& data);

/// Cavity problem with constant source 1 and homogeneous Dirichlet data.
LinearSystem assemble_cavity(std::shared_ptr<const FeSpace> space, double k);

/// Scattering of a plane wave by the obstacle of `geom` with the default PML.
LinearSystem assemble_scatter(std::shared_ptr<const FeSpace> space, double k,
                              const ScatterGeometry& geom, double theta);

cplx plane_wave(double k, double theta, Point p);

}  // namespace hk
