#pragma once

#include <vector>

#include "helmkrylov/linalg/types.hpp"

namespace hk {

struct QuadPoint {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
};

/// Gauss–Legendre nodes and weights on [0, 1] with `n` points (exact for
/// polynomials of degree 2n − 1).
std::vector<QuadPoint> gauss_legendre_01(int n);

/// Rule on the reference triangle (0,0), (1,0), (0,1) exact for polynomials of
/// total degree `degree`. Collapsed (Duffy) tensor product of Gauss–Legendre
/// rules, so all nodes lie strictly inside the triangle. Weights sum to 1/2.
const std::vector<QuadPoint>& triangle_rule(int degree);

}  // namespace hk
