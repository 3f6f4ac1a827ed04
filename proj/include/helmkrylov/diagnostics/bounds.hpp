#pragma once

#include <functional>
#include <string>
#include <vector>

#include "helmkrylov/diagnostics/harmonic_ritz.hpp"
#include "helmkrylov/diagnostics/polynomial.hpp"
#include "helmkrylov/linalg/eigen.hpp"

namespace hk {

/// Contour is invalid: passes too close to the spectrum, encloses the wrong
/// eigenvalues, or has overlapping components.
class ContourError : public Error {
 public:
  using Error::Error;
};

/// Union of closed polygons (vertices listed once, closed implicitly).
struct Contour {
  std::vector<std::vector<cplx>> components;

  double length() const;
  /// Total winding number around z.
  int winding(cplx z) const;
  /// About n points equispaced in arc length, at least 8 per component.
  std::vector<cplx> samples(Index n) const;
  /// Largest arc length between consecutive samples of samples(n).
  double max_spacing(Index n) const;
};

Contour circle_contour(cplx centre, double radius, Index vertices = 64);

/// Convex hulls of Λ_J^c inflated by 0.5·dist(Λ_J ∪ {0}, Λ_J^c), split
/// recursively where a hull would enclose a point of Λ_J or the origin.
/// Throws ContourError when no admissible split exists.
Contour default_contour(const Vec& eigenvalues, const std::vector<Index>& j);

struct BoundReport {
  std::string kind;
  Index l = 0;
  Index m = 0;
  std::vector<Index> j;
  Vec lambda_j;
  Vec nu_j;
  double term_kappa = 0.0;
  double term_s = 0.0;
  double term_minimax = 0.0;
  bool minimax_certified = false;
  double bound = 0.0;
  double measured = 0.0;
  /// Contour data (thm2 reports only).
  double eps = 0.0;
  double contour_length = 0.0;
  Index samples = 0;

  // floor absorbs residuals that are pure roundoff once the iteration has terminated
  bool holds(double slack = 1e-8, double floor = 1e-12) const {
    return bound >= measured * (1.0 - slack) - floor;
  }
};

struct BoundOptions {
  MinimaxOptions minimax;
  /// Initial contour samples (doubled until the certified ε is positive).
  Index samples = 128;
  Index max_samples = 4096;
};

/// Σ_{Λ_J^c} κ(λ_i) · max_{Λ_J^c}|s_J^l| · min-max_{Λ_J^c}|q_m| against
/// ‖r_{l+m}‖/‖r_l‖. N_J are the HR values at l matched to Λ_J = eig[j].
BoundReport bound_thm1(const DenseEig& eig, const GmresTrace& trace, Index l, Index m,
                       const std::vector<Index>& j, const BoundOptions& opts = {});

/// z ↦ s_min(A − zI).
using SminFn = std::function<double(cplx)>;

/// L(Γ)/(2π ε) · max_Γ|s_J^l| · min-max_Γ|q_m|. ε is the sampled minimum of
/// s_min(A − zI) lowered by half the sample spacing (s_min is 1-Lipschitz
/// in z), so it is a certified lower bound on the contour.
BoundReport bound_thm2(const SminFn& smin, double anorm, const Vec& eigenvalues,
                       const Contour& contour, const GmresTrace& trace, Index l, Index m,
                       const std::vector<Index>& j, const BoundOptions& opts = {});
BoundReport bound_thm2(const DenseMatrix& a, const Vec& eigenvalues, const Contour& contour,
                       const GmresTrace& trace, Index l, Index m, const std::vector<Index>& j,
                       const BoundOptions& opts = {});
BoundReport bound_thm2(const SparseMatrix& a, const Vec& eigenvalues, const Contour& contour,
                       const GmresTrace& trace, Index l, Index m, const std::vector<Index>& j,
                       const BoundOptions& opts = {});

/// Σ_{i∈J} v_i v̂_i^*. Refuses a selection that splits a cluster of
/// eigenvalues closer than 1e-10 relative.
DenseMatrix spectral_projector(const DenseEig& eig, const std::vector<Index>& j);

struct Box {
  double re_min = -1.0, re_max = 1.0;
  double im_min = -1.0, im_max = 1.0;
};

/// s_min(A − zI) = 1/‖(A − zI)^{-1}‖ on an nx × ny grid; values(iy, ix).
struct ResolventField {
  std::vector<double> re;
  std::vector<double> im;
  Eigen::MatrixXd values;

  void write_csv(const std::string& path) const;
};

ResolventField resolvent_grid(const SminFn& smin, const Box& box, Index nx, Index ny);
ResolventField resolvent_grid(const DenseMatrix& a, const Box& box, Index nx, Index ny);
ResolventField resolvent_grid(const SparseMatrix& a, const Box& box, Index nx, Index ny);

SminFn dense_smin(const DenseMatrix& a);
SminFn sparse_smin(const SparseMatrix& a);
/// s_min(A − zI) = dist(z, Λ) for a normal matrix with spectrum Λ.
SminFn normal_smin(const Vec& eigenvalues);

}  // namespace hk
