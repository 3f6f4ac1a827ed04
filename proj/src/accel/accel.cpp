#include "helmkrylov/accel/accel.hpp"

#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "helmkrylov/fem/modes.hpp"

namespace hk {

void DeflationCounters::reset() {
  pdef_calls = 0;
  qdef_calls = 0;
  q_calls = 0;
  reduced_solves = 0;
  thin_products = 0;
}

Vec DeflationBasis::apply_pdef(const Vec& v) const {
  require_dims(static_cast<Index>(v.size()) == size(), "P_def apply");
  if (empty()) return v;
  auto& c = *counters_;
  ++c.pdef_calls;
  c.thin_products += 2;
  ++c.reduced_solves;
  const Vec y = e_lu_.solve(z_.adjoint() * v);
  return v - az_ * y;
}

Vec DeflationBasis::apply_qdef(const Vec& v) const {
  require_dims(static_cast<Index>(v.size()) == size(), "Q_def apply");
  if (empty()) return v;
  auto& c = *counters_;
  ++c.qdef_calls;
  c.thin_products += 2;
  return v - z_ * (w_ * v);
}

Vec DeflationBasis::apply_q(const Vec& v) const {
  require_dims(static_cast<Index>(v.size()) == size(), "Q apply");
  if (empty()) return Vec::Zero(v.size());
  auto& c = *counters_;
  ++c.q_calls;
  c.thin_products += 2;
  ++c.reduced_solves;
  return z_ * e_lu_.solve(z_.adjoint() * v);
}

DeflationBasis build_deflation(const SparseMatrix& a, const DenseMatrix& z,
                               const DeflationOptions& opts) {
  require_dims(a.rows() == a.cols(), "deflation: A must be square");
  require_dims(static_cast<Index>(z.rows()) == a.rows(), "deflation: Z rows vs order of A");
  DeflationBasis out;
  out.z_ = z;
  const Eigen::Index nd = z.cols();
  if (nd == 0) {
    out.az_.resize(z.rows(), 0);
    out.e_.resize(0, 0);
    out.w_.resize(0, z.rows());
    return out;
  }
  if (nd > z.rows()) throw DeflationConditionError("deflation: more vectors than unknowns");

  Eigen::ColPivHouseholderQR<DenseMatrix> qr(z);
  qr.setThreshold(opts.condition_tol);
  if (qr.rank() < nd) {
    std::ostringstream os;
    os << "deflation: Z is rank deficient (rank " << qr.rank() << " of " << nd << " columns)";
    throw DeflationConditionError(os.str());
  }

  out.az_.resize(z.rows(), nd);
  for (Eigen::Index j = 0; j < nd; ++j) out.az_.col(j) = a.multiply(Vec(z.col(j)));
  out.e_ = z.adjoint() * out.az_;

  Eigen::JacobiSVD<DenseMatrix> svd_e(out.e_);
  const auto& s = svd_e.singularValues();
  Eigen::JacobiSVD<DenseMatrix> svd_z(z), svd_az(out.az_);
  const double scale = svd_z.singularValues()[0] * svd_az.singularValues()[0];
  if (!(s[nd - 1] > opts.condition_tol * scale)) {
    std::ostringstream os;
    os << "deflation condition violated: s_min(Z*AZ) = " << s[nd - 1] << " <= "
       << opts.condition_tol << " * " << scale;
    throw DeflationConditionError(os.str());
  }
  out.e_lu_.compute(out.e_);
  out.e_residual_ = (out.e_ * out.e_lu_.inverse() - DenseMatrix::Identity(nd, nd)).cwiseAbs().maxCoeff();

  DenseMatrix ahz(z.rows(), nd);
  for (Eigen::Index j = 0; j < nd; ++j) ahz.col(j) = a.multiply_adjoint(Vec(z.col(j)));
  out.w_ = out.e_lu_.solve(DenseMatrix(ahz.adjoint()));
  return out;
}

LinearOperator CslPreconditioner::as_operator() const {
  auto f = solver;
  return LinearOperator(
      A_eps.rows(), [f](const Vec& x, Vec& y) { y = f.solve(x); }, "Aeps^-1");
}

CslPreconditioner build_csl(const LinearSystem& fe, const CslOptions& opts) {
  const Index n = fe.K.rows();
  require_dims(fe.M.rows() == n && fe.K.cols() == n, "CSL: K and M");
  if (!(fe.k > 0.0)) throw DomainError("CSL: wavenumber must be positive");
  CslPreconditioner p;
  p.eps = opts.eps.value_or(fe.k);
  if (p.eps < 0.0) throw ConfigError("CSL: eps must be nonnegative");
  p.kind = opts.kind;
  const cplx shift = fe.k * fe.k + I_unit * p.eps;
  p.A_eps = add(1.0, fe.K, -shift, fe.M);
  if (fe.B.rows() == n && fe.B.nnz() > 0) p.A_eps = add(1.0, p.A_eps, I_unit * fe.k, fe.B);
  IluOptions io = opts.ilu;
  io.kind = opts.kind;
  p.solver = factorize(p.A_eps, io);
  return p;
}

const char* to_string(AccelMethod m) {
  switch (m) {
    case AccelMethod::None: return "none";
    case AccelMethod::Csl: return "csl";
    case AccelMethod::Deflation: return "deflation";
    case AccelMethod::CslDeflation: return "csl+deflation";
    case AccelMethod::Additive: return "additive";
  }
  return "?";
}

AccelMethod accel_method_from_string(const std::string& name) {
  for (auto m : {AccelMethod::None, AccelMethod::Csl, AccelMethod::Deflation,
                 AccelMethod::CslDeflation, AccelMethod::Additive}) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("unknown acceleration method '" + name + "'");
}

AcceleratedSystem plain_system(std::shared_ptr<const SparseMatrix> a, const Vec& b) {
  require_dims(static_cast<Index>(b.size()) == a->rows(), "plain system");
  AcceleratedSystem s;
  s.method = AccelMethod::None;
  s.op = LinearOperator::from_matrix(a);
  s.rhs = b;
  return s;
}

AcceleratedSystem csl_system(std::shared_ptr<const SparseMatrix> a, const Vec& b,
                             std::shared_ptr<const CslPreconditioner> precond) {
  if (!precond) return plain_system(a, b);
  require_dims(precond->A_eps.rows() == a->rows(), "CSL system");
  AcceleratedSystem s;
  s.method = AccelMethod::Csl;
  s.op = LinearOperator::from_matrix(a).compose(precond->as_operator());
  s.rhs = b;
  s.chain = RecoveryChain{"Aeps^-1 x", [precond](const Vec& x) { return precond->apply(x); }};
  return s;
}

double preconditioned_condition(const DeflationBasis& basis, const CslPreconditioner& precond) {
  if (basis.empty()) return 1.0;
  const DenseMatrix& z = basis.Z();
  DenseMatrix mz(z.rows(), z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) mz.col(j) = precond.apply(Vec(z.col(j)));
  const DenseMatrix g = z.adjoint() * mz;
  Eigen::JacobiSVD<DenseMatrix> sg(g), sz(z), sm(mz);
  const double scale = sz.singularValues()[0] * sm.singularValues()[0];
  return sg.singularValues()[g.cols() - 1] / scale;
}

AcceleratedSystem deflated_system(std::shared_ptr<const SparseMatrix> a, const Vec& b,
                                  std::shared_ptr<const DeflationBasis> basis,
                                  std::shared_ptr<const CslPreconditioner> precond,
                                  const DeflationOptions& opts) {
  if (!basis || basis->empty()) return csl_system(a, b, precond);
  require_dims(basis->size() == a->rows(), "deflated system");
  AcceleratedSystem s;
  const Vec qb = basis->apply_q(b);
  s.rhs = basis->apply_pdef(b);
  LinearOperator pdef(a->rows(), [basis](const Vec& x, Vec& y) { y = basis->apply_pdef(x); }, "Pdef");
  LinearOperator core = LinearOperator::from_matrix(a);
  if (precond) {
    const double c = preconditioned_condition(*basis, *precond);
    if (!(c > opts.condition_tol)) {
      std::ostringstream os;
      os << "preconditioned deflation condition violated: s_min(Z* Aeps^-1 Z) relative = " << c;
      throw DeflationConditionError(os.str());
    }
    s.method = AccelMethod::CslDeflation;
    s.op = pdef.compose(core.compose(precond->as_operator()));
    s.chain = RecoveryChain{"Qb + Qdef Aeps^-1 x", [basis, precond, qb](const Vec& x) {
                              return Vec(qb + basis->apply_qdef(precond->apply(x)));
                            }};
  } else {
    s.method = AccelMethod::Deflation;
    s.op = pdef.compose(core);
    s.chain = RecoveryChain{"Qb + Qdef x", [basis, qb](const Vec& x) {
                              return Vec(qb + basis->apply_qdef(x));
                            }};
  }
  return s;
}

AcceleratedSystem additive_coarse_correction(std::shared_ptr<const SparseMatrix> a, const Vec& b,
                                             std::shared_ptr<const DeflationBasis> basis,
                                             std::shared_ptr<const CslPreconditioner> precond) {
  if (!basis || basis->empty()) {
    if (!precond) throw ConfigError("additive correction needs a basis or a preconditioner");
    AcceleratedSystem s = csl_system(a, b, precond);
    s.method = AccelMethod::Additive;
    return s;
  }
  require_dims(basis->size() == a->rows(), "additive correction");
  auto m = [basis, precond](const Vec& x) {
    Vec y = basis->apply_q(x);
    if (precond) y += precond->apply(x);
    return y;
  };
  AcceleratedSystem s;
  s.method = AccelMethod::Additive;
  s.rhs = b;
  s.op = LinearOperator::from_matrix(a).compose(
      LinearOperator(a->rows(), [m](const Vec& x, Vec& y) { y = m(x); }, "Aeps^-1+Q"));
  s.chain = RecoveryChain{"(Aeps^-1 + Q) x", m};
  return s;
}

AccelResult solve_accelerated(const SparseMatrix& a, const Vec& b, const AcceleratedSystem& sys,
                              const GmresOptions& opts) {
  require_dims(static_cast<Index>(b.size()) == a.rows(), "accelerated solve");
  GmresOptions o = opts;
  if (!o.reference_norm) o.reference_norm = b.norm();
  auto g = gmres(sys.op, sys.rhs, o);
  AccelResult r;
  r.u = sys.chain(g.x);
  r.trace = std::move(g.trace);
  r.true_relres = true_residual(a, RecoveryChain{}, r.u, b);
  r.verified = r.trace.converged && r.true_relres <= o.tol * (1.0 + 1e-6);
  return r;
}

AccelResult solve_deflated(std::shared_ptr<const SparseMatrix> a, const Vec& b,
                           std::shared_ptr<const DeflationBasis> basis,
                           std::shared_ptr<const CslPreconditioner> precond,
                           const GmresOptions& opts) {
  return solve_accelerated(*a, b, deflated_system(a, b, std::move(basis), std::move(precond)), opts);
}

DenseMatrix deflation_vectors(const FeSpace& space, const std::vector<ScalarField>& fields) {
  DenseMatrix z(static_cast<Eigen::Index>(space.ndof_free()), static_cast<Eigen::Index>(fields.size()));
  for (std::size_t j = 0; j < fields.size(); ++j) {
    z.col(static_cast<Eigen::Index>(j)) = project_mode(space, fields[j]);
  }
  return z;
}

}  // namespace hk
