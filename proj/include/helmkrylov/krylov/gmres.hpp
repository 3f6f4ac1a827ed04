#pragma once

#include <optional>
#include <vector>

#include "helmkrylov/krylov/linear_operator.hpp"

namespace hk {

enum class RecordLevel {
  /// Residual norms only.
  Residuals,
  /// Residual norms and extended Hessenberg matrices.
  Snapshots,
  /// As Snapshots, plus the orthonormal Krylov basis of every cycle.
  Full,
};

RecordLevel record_level_from_string(const std::string& name);

struct GmresOptions {
  double tol = 1e-6;
  Index max_iter = 2000;
  /// Cycle length m of GMRES(m); unset means full GMRES.
  std::optional<Index> restart;
  /// Initial guess; empty means zero.
  Vec x0;
  RecordLevel record = RecordLevel::Snapshots;
  /// Iterations between listed snapshots (the final iterate is always listed).
  Index snapshot_stride = 10;
  bool reorthogonalize = true;
  /// Denominator of the relative residual; defaults to ‖b − A x0‖.
  std::optional<double> reference_norm;
};

/// One restart cycle: the extended Hessenberg matrix H̄ of size (j+1)×j after
/// j Arnoldi steps, starting at global iteration `start`. The snapshot at
/// global iteration start + l is the leading (l+1)×l block.
struct GmresCycle {
  Index start = 0;
  DenseMatrix hessenberg;
  /// Orthonormal basis U_{j+1} (RecordLevel::Full only).
  DenseMatrix basis;
  /// ‖r‖ at the start of the cycle.
  double beta = 0.0;
};

struct GmresTrace {
  /// ‖r_0‖, ‖r_1‖, … (Givens recurrence within each cycle).
  std::vector<double> residual_norms;
  double reference_norm = 1.0;
  /// Global iterations at which a new cycle starts (0 excluded).
  std::vector<Index> restart_marks;
  /// Iterations listed as snapshots (every stride and the last one).
  std::vector<Index> snapshot_iterations;
  std::vector<GmresCycle> cycles;
  bool converged = false;
  bool breakdown = false;
  Index iterations = 0;
  /// ‖b − A x‖ / reference for the returned iterate.
  double true_relres = 0.0;
  Index matvecs = 0;

  double relres(Index l) const { return residual_norms.at(l) / reference_norm; }
  double final_relres() const { return residual_norms.empty() ? 0.0 : relres(residual_norms.size() - 1); }
  bool is_restart(Index l) const;

  /// Whether the Hessenberg snapshot of iteration l is available.
  bool has_snapshot(Index l) const;
  /// Extended Hessenberg H̄_l of the cycle containing iteration l, l ≥ 1
  /// counted from the cycle start.
  DenseMatrix hessenberg(Index l) const;
  const GmresCycle& cycle_of(Index l) const;
};

struct GmresResult {
  Vec x;
  GmresTrace trace;
};

/// Right-side GMRES with modified Gram–Schmidt Arnoldi, optional conditional
/// reorthogonalization and Givens least squares. Never throws on
/// non-convergence; check trace.converged.
GmresResult gmres(const LinearOperator& op, const Vec& b, const GmresOptions& opts = {});

}  // namespace hk
