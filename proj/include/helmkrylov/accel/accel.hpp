#pragma once

#include <atomic>
#include <memory>
#include <optional>

#include <Eigen/LU>

#include "helmkrylov/fem/assembly.hpp"
#include "helmkrylov/krylov/gmres.hpp"
#include "helmkrylov/linalg/factorization.hpp"

namespace hk {

/// The deflation condition ker(Z*) ∩ range(AZ) = {0} (or its preconditioned
/// analogue) failed numerically.
class DeflationConditionError : public Error {
 public:
  using Error::Error;
};

/// Operation counts of the deflation operators, shared by copies of a basis.
struct DeflationCounters {
  std::atomic<std::uint64_t> pdef_calls{0};
  std::atomic<std::uint64_t> qdef_calls{0};
  std::atomic<std::uint64_t> q_calls{0};
  /// Solves with E (order n_def).
  std::atomic<std::uint64_t> reduced_solves{0};
  /// Products with an N×n_def or n_def×N dense block.
  std::atomic<std::uint64_t> thin_products{0};

  void reset();
};

struct DeflationOptions {
  /// Relative threshold for the rank of Z and the conditioning of E.
  double condition_tol = 1e-12;
};

/// Deflation space Z with AZ, E = Z*AZ (LU-factorized) and W = E^{-1} Z*A.
///
///   P_def = I − AQ,  Q_def = I − QA,  Q = Z E^{-1} Z*.
class DeflationBasis {
 public:
  DeflationBasis() = default;

  Index size() const { return static_cast<Index>(z_.rows()); }
  Index count() const { return static_cast<Index>(z_.cols()); }
  bool empty() const { return z_.cols() == 0; }

  const DenseMatrix& Z() const { return z_; }
  const DenseMatrix& AZ() const { return az_; }
  const DenseMatrix& E() const { return e_; }
  const DenseMatrix& W() const { return w_; }
  /// ‖E·E^{-1} − I‖_max of the stored factorization.
  double factorization_residual() const { return e_residual_; }

  Vec apply_pdef(const Vec& v) const;
  Vec apply_qdef(const Vec& v) const;
  Vec apply_q(const Vec& v) const;

  DeflationCounters& counters() const { return *counters_; }

  friend DeflationBasis build_deflation(const SparseMatrix& a, const DenseMatrix& z,
                                        const DeflationOptions& opts);

 private:
  DenseMatrix z_, az_, e_, w_;
  Eigen::PartialPivLU<DenseMatrix> e_lu_;
  double e_residual_ = 0.0;
  std::shared_ptr<DeflationCounters> counters_ = std::make_shared<DeflationCounters>();
};

/// Throws DimensionError, DeflationConditionError (rank-deficient Z or
/// nearly singular E).
DeflationBasis build_deflation(const SparseMatrix& a, const DenseMatrix& z,
                               const DeflationOptions& opts = {});

struct CslOptions {
  FactorKind kind = FactorKind::ILU0;
  /// Imaginary shift ε; unset means ε = k.
  std::optional<double> eps;
  IluOptions ilu;
};

/// Complex shifted Laplacian A_ε = K − (k² + iε)M + ikB and a solver for it.
struct CslPreconditioner {
  SparseMatrix A_eps;
  double eps = 0.0;
  FactorKind kind = FactorKind::ILU0;
  Factorization solver;

  Vec apply(const Vec& v) const { return solver.solve(v); }
  LinearOperator as_operator() const;
};

CslPreconditioner build_csl(const LinearSystem& fe, const CslOptions& opts = {});

enum class AccelMethod { None, Csl, Deflation, CslDeflation, Additive };
const char* to_string(AccelMethod m);
AccelMethod accel_method_from_string(const std::string& name);

/// Operator, right-hand side and recovery of one accelerated formulation.
struct AcceleratedSystem {
  AccelMethod method = AccelMethod::None;
  LinearOperator op;
  Vec rhs;
  RecoveryChain chain;
};

/// A u = b.
AcceleratedSystem plain_system(std::shared_ptr<const SparseMatrix> a, const Vec& b);
/// A A_ε^{-1} x = b, u = A_ε^{-1} x.
AcceleratedSystem csl_system(std::shared_ptr<const SparseMatrix> a, const Vec& b,
                             std::shared_ptr<const CslPreconditioner> precond);
/// P_def A ũ = P_def b with u = Qb + Q_def ũ, or with a preconditioner
/// P_def A A_ε^{-1} x̃ = P_def b with u = Qb + Q_def A_ε^{-1} x̃.
/// An empty basis falls back to plain_system / csl_system.
AcceleratedSystem deflated_system(std::shared_ptr<const SparseMatrix> a, const Vec& b,
                                  std::shared_ptr<const DeflationBasis> basis,
                                  std::shared_ptr<const CslPreconditioner> precond = nullptr,
                                  const DeflationOptions& opts = {});
/// A (A_ε^{-1} + Q) x = b with u = (A_ε^{-1} + Q) x. A null preconditioner
/// stands for A_ε^{-1} = 0.
AcceleratedSystem additive_coarse_correction(std::shared_ptr<const SparseMatrix> a, const Vec& b,
                                             std::shared_ptr<const DeflationBasis> basis,
                                             std::shared_ptr<const CslPreconditioner> precond);

struct AccelResult {
  Vec u;
  GmresTrace trace;
  /// ‖b − Au‖/‖b‖ of the recovered solution.
  double true_relres = 0.0;
  /// true_relres ≤ tol·(1 + 1e-6) when the trace reports convergence.
  bool verified = false;
};

/// GMRES on the formulation with tolerance relative to ‖b‖, then recovery.
AccelResult solve_accelerated(const SparseMatrix& a, const Vec& b, const AcceleratedSystem& sys,
                              const GmresOptions& opts = {});

AccelResult solve_deflated(std::shared_ptr<const SparseMatrix> a, const Vec& b,
                           std::shared_ptr<const DeflationBasis> basis,
                           std::shared_ptr<const CslPreconditioner> precond = nullptr,
                           const GmresOptions& opts = {});

/// Columns of the free-dof interpolants of the given fields.
DenseMatrix deflation_vectors(const FeSpace& space, const std::vector<ScalarField>& fields);

/// Numerical check of ker(Z*) ∩ range(A_ε^{-1}Z) = {0}: smallest singular
/// value of Z* A_ε^{-1} Z relative to ‖Z‖‖A_ε^{-1}Z‖.
double preconditioned_condition(const DeflationBasis& basis, const CslPreconditioner& precond);

}  // namespace hk
