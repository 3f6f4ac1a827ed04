#pragma once

#include <vector>

#include "helmkrylov/linalg/types.hpp"

namespace hk {

/// max over z of |Π(1 − z/λ_j) / Π(1 − z/ν_j)|. Throws DomainError for a
/// zero λ or ν, for |Λ_J| ≠ |N_J|, or for z within 1e-14 of some ν.
double s_ratio(const Vec& lambda_j, const Vec& nu_j, const Vec& points);
/// The same ratio at a single point.
cplx s_value(const Vec& lambda_j, const Vec& nu_j, cplx z);

struct MinimaxOptions {
  int max_iterations = 500;
  /// Certification when (upper − lower) ≤ tol·upper.
  double tol = 1e-6;
};

struct MinimaxResult {
  /// max_i |q(z_i)| of the best polynomial found; an upper estimate of the
  /// min-max value.
  double value = 0.0;
  /// Lawson lower bound on the min-max value.
  double lower = 0.0;
  bool certified = false;
  int iterations = 0;
};

/// Upper estimate of min over q ∈ P_m with q(0) = 1 of max_i |q(z_i)|,
/// by Lawson's iteratively reweighted least squares in an Arnoldi basis on
/// the point set. Throws DomainError if 0 is a point.
MinimaxResult minimax_poly(const Vec& points, Index m, const MinimaxOptions& opts = {});

}  // namespace hk
