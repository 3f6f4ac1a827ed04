#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "helmkrylov/krylov/gmres.hpp"
#include "test_util.hpp"

using namespace hk;
using Catch::Approx;

namespace {

LinearOperator diag_op(Index n) {
  Vec d(static_cast<Eigen::Index>(n));
  for (Index i = 0; i < n; ++i) d[static_cast<Eigen::Index>(i)] = static_cast<double>(i + 1);
  return LinearOperator::from_matrix(SparseMatrix::diagonal(d));
}

// Iterate x_l = x_cycle_start + U_l y_l reconstructed from a full-record trace
// (single cycle, x0 = 0).
Vec iterate_at(const GmresTrace& tr, Index l) {
  const auto& c = tr.cycle_of(l);
  const DenseMatrix hb = tr.hessenberg(l);
  Vec rhs = Vec::Zero(hb.rows());
  rhs[0] = c.beta;
  const Vec y = hb.colPivHouseholderQr().solve(rhs);
  return c.basis.leftCols(static_cast<Eigen::Index>(l - c.start)) * y;
}

}  // namespace

TEST_CASE("gmres on the identity", "[gmres]") {
  std::mt19937_64 rng(1);
  const Vec b = hk::testing::random_vec(rng, 7);
  auto res = gmres(LinearOperator::identity(7), b);
  CHECK(res.trace.converged);
  CHECK(res.trace.iterations == 1);
  CHECK(res.trace.residual_norms.back() == 0.0);
  CHECK((res.x - b).norm() < 1e-15 * b.norm());
}

TEST_CASE("gmres terminates after N steps on a diagonal matrix", "[gmres]") {
  std::mt19937_64 rng(2);
  const Vec b = hk::testing::random_vec(rng, 10);
  GmresOptions o;
  o.tol = 1e-13;
  auto res = gmres(diag_op(10), b, o);
  CHECK(res.trace.iterations <= 10);
  CHECK(res.trace.converged);
  CHECK(res.trace.residual_norms.back() <= 1e-12 * b.norm());
}

TEST_CASE("gmres option validation and non-convergence", "[gmres]") {
  std::mt19937_64 rng(3);
  auto op = LinearOperator::from_dense(hk::testing::random_dense(rng, 40, 40));
  const Vec b = hk::testing::random_vec(rng, 40);
  GmresOptions o;
  o.max_iter = 5;
  auto res = gmres(op, b, o);
  CHECK_FALSE(res.trace.converged);
  CHECK(res.trace.iterations == 5);
  CHECK(res.trace.residual_norms.size() == 6);
  o.tol = 0.0;
  CHECK_THROWS_AS(gmres(op, b, o), ConfigError);
  CHECK_THROWS_AS(gmres(op, Vec::Ones(3)), DimensionError);
  CHECK(record_level_from_string("full") == RecordLevel::Full);
  CHECK_THROWS_AS(record_level_from_string("all"), ConfigError);
}

TEST_CASE("gmres trace invariants on random systems", "[gmres][property]") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 60;
    DenseMatrix a = hk::testing::random_dense(rng, n, n) + 8.0 * DenseMatrix::Identity(n, n);
    const Vec b = hk::testing::random_vec(rng, n);
    GmresOptions o;
    o.tol = 1e-10;
    o.record = RecordLevel::Full;
    auto res = gmres(LinearOperator::from_dense(a), b, o);
    const auto& tr = res.trace;
    REQUIRE(tr.cycles.size() == 1);
    for (Index l = 1; l < tr.residual_norms.size(); ++l) {
      CHECK(tr.residual_norms[l] <= tr.residual_norms[l - 1] * (1 + 1e-14));
    }
    const auto& c = tr.cycles[0];
    const Eigen::Index l = c.hessenberg.cols();
    const DenseMatrix& u = c.basis;
    CHECK((u.adjoint() * u - DenseMatrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff() <= 1e-10);
    const double an = a.operatorNorm();
    CHECK((a * u.leftCols(l) - u.leftCols(l + 1) * c.hessenberg).norm() <= 1e-10 * an);
    for (Index s : tr.snapshot_iterations) {
      const Vec xs = iterate_at(tr, s);
      const double explicit_res = (b - a * xs).norm();
      CHECK(explicit_res == Approx(tr.residual_norms[s]).epsilon(1e-8).margin(1e-12 * b.norm()));
    }
    CHECK(tr.true_relres <= 1e-10);
  }
}

TEST_CASE("gmres residual is optimal over polynomials", "[gmres][property]") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Index n = 30;
    DenseMatrix a = hk::testing::random_dense(rng, n, n) + 5.0 * DenseMatrix::Identity(n, n);
    const Vec b = hk::testing::random_vec(rng, n);
    GmresOptions o;
    o.tol = 1e-14;
    o.max_iter = 8;
    auto res = gmres(LinearOperator::from_dense(a), b, o);
    for (Index l = 1; l <= 8; ++l) {
      for (int q = 0; q < 50; ++q) {
        // q(z) = 1 + c_1 z + … + c_l z^l applied by Horner.
        std::vector<cplx> c(l + 1);
        c[0] = 1.0;
        for (Index i = 1; i <= l; ++i) c[i] = cplx(gauss(rng), gauss(rng)) * 0.2;
        Vec acc = c[l] * b;
        for (Index i = l; i-- > 0;) acc = (a * acc).eval() + c[i] * b;
        CHECK(res.trace.residual_norms[l] <= acc.norm() * (1 + 1e-10));
      }
    }
  }
}

TEST_CASE("gmres is invariant under scaling of b", "[gmres][property]") {
  std::mt19937_64 rng(6);
  DenseMatrix a = hk::testing::random_dense(rng, 25, 25) + 4.0 * DenseMatrix::Identity(25, 25);
  auto op = LinearOperator::from_dense(a);
  const Vec b = hk::testing::random_vec(rng, 25);
  auto r1 = gmres(op, b);
  auto r2 = gmres(op, Vec(b * cplx(3.0, -2.0)));
  REQUIRE(r1.trace.iterations == r2.trace.iterations);
  for (Index l = 0; l <= r1.trace.iterations; ++l) {
    CHECK(r1.trace.relres(l) == Approx(r2.trace.relres(l)).epsilon(1e-10).margin(1e-14));
  }
}

TEST_CASE("restarted gmres", "[gmres][restart]") {
  std::mt19937_64 rng(7);
  const Eigen::Index n = 40;
  DenseMatrix a = hk::testing::random_dense(rng, n, n) + 20.0 * DenseMatrix::Identity(n, n);
  auto op = LinearOperator::from_dense(a);
  const Vec b = hk::testing::random_vec(rng, n);

  GmresOptions full;
  full.tol = 1e-12;
  auto rf = gmres(op, b, full);
  GmresOptions big = full;
  big.restart = 60;
  auto rb = gmres(op, b, big);
  CHECK(rb.trace.residual_norms == rf.trace.residual_norms);
  CHECK((rb.x - rf.x).norm() == 0.0);

  GmresOptions small = full;
  small.restart = 5;
  small.max_iter = 400;
  auto rs = gmres(op, b, small);
  CHECK(rs.trace.converged);
  CHECK_FALSE(rs.trace.restart_marks.empty());
  CHECK(rs.trace.restart_marks.front() == 5);
  for (Index mark : rs.trace.restart_marks) CHECK(mark % 5 == 0);
  CHECK(rs.trace.cycles.size() == rs.trace.restart_marks.size() + 1);
  CHECK(rs.trace.hessenberg(7).rows() == 3);
  CHECK(rs.trace.is_restart(5));
  // Monotone within each cycle; GMRES(m) never increases the residual at all.
  for (Index l = 1; l < rs.trace.residual_norms.size(); ++l) {
    CHECK(rs.trace.residual_norms[l] <= rs.trace.residual_norms[l - 1] * (1 + 1e-12));
  }
  CHECK(rs.trace.iterations > rf.trace.iterations);
}

TEST_CASE("gmres with an initial guess and a reference norm", "[gmres]") {
  std::mt19937_64 rng(8);
  DenseMatrix a = hk::testing::random_dense(rng, 20, 20) + 5.0 * DenseMatrix::Identity(20, 20);
  auto op = LinearOperator::from_dense(a);
  const Vec b = hk::testing::random_vec(rng, 20);
  GmresOptions o;
  o.x0 = a.partialPivLu().solve(b) + 1e-3 * hk::testing::random_vec(rng, 20);
  auto res = gmres(op, b, o);
  CHECK(res.trace.converged);
  CHECK((b - a * res.x).norm() <= 1e-6 * (b - a * o.x0).norm());
  GmresOptions r;
  r.reference_norm = 2.0 * b.norm();
  auto rr = gmres(op, b, r);
  CHECK(rr.trace.reference_norm == 2.0 * b.norm());
  CHECK((b - a * rr.x).norm() <= 1e-6 * 2.0 * b.norm());
}

TEST_CASE("operators are linear and compose", "[operator][property]") {
  std::mt19937_64 rng(9);
  auto a = hk::testing::random_sparse(rng, 30, 0.2);
  auto op = LinearOperator::from_matrix(a);
  for (int t = 0; t < 20; ++t) {
    const Vec u = hk::testing::random_vec(rng, 30), v = hk::testing::random_vec(rng, 30);
    const cplx al(0.3, 1.1), be(-2.0, 0.5);
    const Vec lhs = op.apply(Vec(al * u + be * v));
    const Vec rhs = al * op.apply(u) + be * op.apply(v);
    CHECK((lhs - rhs).norm() <= 1e-12 * (a.norm_frobenius() * (u.norm() + v.norm())));
  }
  auto sq = op.compose(op);
  const Vec x = hk::testing::random_vec(rng, 30);
  CHECK((sq.apply(x) - a.multiply(a.multiply(x))).norm() < 1e-12 * x.norm() * a.norm_frobenius() * a.norm_frobenius());
}

TEST_CASE("true residual without acceleration matches the trace", "[gmres]") {
  std::mt19937_64 rng(10);
  auto a = hk::testing::random_sparse(rng, 50, 0.1, 5.0);
  const Vec b = hk::testing::random_vec(rng, 50);
  auto res = gmres(LinearOperator::from_matrix(a), b);
  const double tr = true_residual(a, RecoveryChain{}, res.x, b);
  CHECK(tr == Approx(res.trace.final_relres()).epsilon(1e-8));
  CHECK(tr == Approx(res.trace.true_relres).epsilon(1e-12));
}
