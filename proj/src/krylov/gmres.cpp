#include "helmkrylov/krylov/gmres.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hk {

RecordLevel record_level_from_string(const std::string& name) {
  if (name == "residuals") return RecordLevel::Residuals;
  if (name == "snapshots") return RecordLevel::Snapshots;
  if (name == "full") return RecordLevel::Full;
  throw ConfigError("unknown record level '" + name + "'");
}

bool GmresTrace::is_restart(Index l) const {
  return std::find(restart_marks.begin(), restart_marks.end(), l) != restart_marks.end();
}

const GmresCycle& GmresTrace::cycle_of(Index l) const {
  for (const auto& c : cycles) {
    if (l > c.start && l <= c.start + static_cast<Index>(c.hessenberg.cols())) return c;
  }
  throw DomainError("no Hessenberg snapshot recorded for iteration " + std::to_string(l));
}

bool GmresTrace::has_snapshot(Index l) const {
  return std::any_of(cycles.begin(), cycles.end(), [&](const GmresCycle& c) {
    return l > c.start && l <= c.start + static_cast<Index>(c.hessenberg.cols());
  });
}

DenseMatrix GmresTrace::hessenberg(Index l) const {
  const GmresCycle& c = cycle_of(l);
  const Eigen::Index j = static_cast<Eigen::Index>(l - c.start);
  return c.hessenberg.topLeftCorner(j + 1, j);
}

namespace {

// Complex Givens rotation zeroing b in (a, b) with b real and nonnegative.
struct Givens {
  double c = 1.0;
  cplx s = 0.0;

  static Givens make(cplx a, cplx b) {
    Givens g;
    const double na = std::abs(a);
    const double nb = std::abs(b);
    if (nb == 0.0) return g;
    if (na == 0.0) {
      g.c = 0.0;
      g.s = std::conj(b) / nb;
      return g;
    }
    const double rho = std::hypot(na, nb);
    g.c = na / rho;
    g.s = (a / na) * std::conj(b) / rho;
    return g;
  }

  void apply(cplx& x, cplx& y) const {
    const cplx t = c * x + s * y;
    y = -std::conj(s) * x + c * y;
    x = t;
  }
};

}  // namespace

GmresResult gmres(const LinearOperator& op, const Vec& b, const GmresOptions& opts) {
  const Index n = op.size();
  require_dims(static_cast<Index>(b.size()) == n, "gmres right-hand side");
  require_dims(opts.x0.size() == 0 || static_cast<Index>(opts.x0.size()) == n, "gmres initial guess");
  if (!(opts.tol > 0.0)) throw ConfigError("gmres: tolerance must be positive");
  if (opts.restart && *opts.restart == 0) throw ConfigError("gmres: restart length must be positive");

  GmresResult out;
  GmresTrace& tr = out.trace;
  Vec x = opts.x0.size() == 0 ? Vec::Zero(static_cast<Eigen::Index>(n)) : opts.x0;
  Vec r = b;
  Vec w(static_cast<Eigen::Index>(n));
  if (opts.x0.size() != 0) {
    op.apply(x, w);
    ++tr.matvecs;
    r -= w;
  }
  double beta = r.norm();
  tr.reference_norm = opts.reference_norm ? *opts.reference_norm : beta;
  if (!(tr.reference_norm > 0.0)) tr.reference_norm = 1.0;
  tr.residual_norms.push_back(beta);
  const double target = opts.tol * tr.reference_norm;

  const Index m = std::max<Index>(1, std::min(opts.restart ? *opts.restart : opts.max_iter, opts.max_iter));
  const Eigen::Index em = static_cast<Eigen::Index>(m);
  DenseMatrix v(static_cast<Eigen::Index>(n), em + 1);
  DenseMatrix h(em + 1, em);
  DenseMatrix rr(em + 1, em);
  Vec g(em + 1);
  std::vector<Givens> rot(m);
  const double reorth_trigger = 1.0 / std::sqrt(2.0);

  Index total = 0;
  bool done = beta <= target;
  tr.converged = done;
  while (!done && total < opts.max_iter) {
    if (total > 0) tr.restart_marks.push_back(total);
    const Index start = total;
    v.col(0) = r / beta;
    h.setZero();
    g.setZero();
    g[0] = beta;
    Eigen::Index j = 0;
    bool stop_cycle = false;
    while (j < em && total < opts.max_iter && !stop_cycle) {
      op.apply(v.col(j), w);
      ++tr.matvecs;
      const double w_in = w.norm();
      for (Eigen::Index i = 0; i <= j; ++i) {
        const cplx hij = v.col(i).dot(w);
        h(i, j) = hij;
        w -= hij * v.col(i);
      }
      double wn = w.norm();
      if (opts.reorthogonalize && wn < reorth_trigger * w_in) {
        for (Eigen::Index i = 0; i <= j; ++i) {
          const cplx c = v.col(i).dot(w);
          h(i, j) += c;
          w -= c * v.col(i);
        }
        wn = w.norm();
      }
      h(j + 1, j) = wn;

      for (Eigen::Index i = 0; i <= j; ++i) rr(i, j) = h(i, j);
      rr(j + 1, j) = wn;
      for (Eigen::Index i = 0; i < j; ++i) rot[static_cast<std::size_t>(i)].apply(rr(i, j), rr(i + 1, j));
      rot[static_cast<std::size_t>(j)] = Givens::make(rr(j, j), rr(j + 1, j));
      rot[static_cast<std::size_t>(j)].apply(rr(j, j), rr(j + 1, j));
      rr(j + 1, j) = 0.0;
      rot[static_cast<std::size_t>(j)].apply(g[j], g[j + 1]);

      ++j;
      ++total;
      const double res = std::abs(g[j]);
      tr.residual_norms.push_back(res);
      const bool lucky = wn <= 1e-14 * std::max(w_in, std::numeric_limits<double>::min());
      if (lucky) {
        tr.breakdown = true;
        stop_cycle = true;
      } else {
        v.col(j) = w / wn;
      }
      if (res <= target) stop_cycle = true;
    }

    // x += V_j y with R_j y = g_j.
    Vec y = rr.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    x += v.leftCols(j) * y;

    if (opts.record != RecordLevel::Residuals) {
      GmresCycle cyc;
      cyc.start = start;
      cyc.beta = beta;
      cyc.hessenberg = h.topLeftCorner(j + 1, j);
      if (opts.record == RecordLevel::Full) cyc.basis = v.leftCols(tr.breakdown ? j : j + 1);
      tr.cycles.push_back(std::move(cyc));
    }

    op.apply(x, w);
    ++tr.matvecs;
    r = b - w;
    beta = r.norm();
    if (beta <= target) {
      done = true;
      tr.converged = true;
    } else if (tr.breakdown) {
      // The Krylov space is invariant; restarting cannot improve the iterate.
      done = true;
    }
  }

  tr.iterations = total;
  tr.true_relres = beta / tr.reference_norm;
  if (opts.record != RecordLevel::Residuals) {
    for (Index l = opts.snapshot_stride; l < total; l += std::max<Index>(1, opts.snapshot_stride)) {
      if (tr.has_snapshot(l)) tr.snapshot_iterations.push_back(l);
    }
    if (total > 0 && tr.has_snapshot(total)) tr.snapshot_iterations.push_back(total);
  }
  out.x = std::move(x);
  return out;
}

}  // namespace hk
