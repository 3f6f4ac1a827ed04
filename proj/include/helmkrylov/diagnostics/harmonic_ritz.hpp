#pragma once

#include <optional>
#include <vector>

#include "helmkrylov/krylov/gmres.hpp"

namespace hk {

/// Harmonic Ritz values of an extended Hessenberg matrix H̄ ((l+1)×l):
/// eigenvalues of H + |h_{l+1,l}|² f e_l^T with H^* f = e_l, sorted by
/// modulus. Throws SingularMatrixError when H is numerically singular.
Vec harmonic_ritz(const DenseMatrix& hbar);

/// Roots of the degree-l polynomial p with p(0) = 1 minimizing ‖p(A) r0‖,
/// by least squares on the Krylov block [A r0, …, A^l r0] in extended
/// precision. Small problems only (l ≤ 15, N ≤ 200); throws DomainError
/// otherwise.
Vec minimizing_polynomial_roots(const DenseMatrix& a, const Vec& r0, Index l);

inline constexpr Index kOracleMaxDegree = 15;
inline constexpr Index kOracleMaxOrder = 200;

/// Injective nearest-neighbour matching of targets to candidates in the
/// distance |ν − λ| / |λ|, assigned greedily from the closest pair.
struct HrMatch {
  /// Candidate index per target, −1 when candidates ran out.
  std::vector<long> index;
  /// |ν − λ| per target (infinity when unmatched).
  std::vector<double> distance;
};

HrMatch match_nearest(const Vec& targets, const Vec& candidates);

struct HrSnapshot {
  Index iteration = 0;
  Vec values;
  HrMatch match;
};

struct HrTrajectory {
  Vec tracked;
  std::vector<HrSnapshot> snapshots;

  /// First snapshot iteration at which the matched HR value lies within
  /// rel·|λ| of tracked eigenvalue `id`.
  std::optional<Index> first_within(Index id, double rel) const;
  /// Rows iter,re,im,matched_eig_id,dist, one per HR value; unmatched values
  /// carry id −1 and the distance to the nearest tracked eigenvalue.
  void write_csv(const std::string& path) const;
};

/// HR values at the given iterations (single-cycle traces or iterations
/// inside one cycle) matched against `tracked`.
HrTrajectory hr_trajectory(const GmresTrace& trace, const std::vector<Index>& iterations,
                           const Vec& tracked);

}  // namespace hk
