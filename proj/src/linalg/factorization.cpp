#include "helmkrylov/linalg/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

namespace hk {

using EigenSparse = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;

struct Factorization::ExactImpl {
  // SparseLU::adjoint() is non-const although it does not modify the factors.
  mutable Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
};

namespace {

[[noreturn]] void zero_pivot(Index row) {
  std::ostringstream os;
  os << "zero pivot in incomplete factorization at row " << row
     << " (request an explicit pivot shift to perturb it)";
  throw SingularMatrixError(os.str());
}

// Forward sweep with the unit lower factor (strict part stored).
void lower_solve(const SparseMatrix& l, Vec& x) {
  const auto& off = l.row_offsets();
  const auto& col = l.col_indices();
  const auto& val = l.values();
  for (Index i = 0; i < l.rows(); ++i) {
    cplx acc = x[static_cast<Eigen::Index>(i)];
    for (Index p = off[i]; p < off[i + 1]; ++p) {
      acc -= val[p] * x[static_cast<Eigen::Index>(col[p])];
    }
    x[static_cast<Eigen::Index>(i)] = acc;
  }
}

// Backward sweep; the diagonal is the first stored entry of each row.
void upper_solve(const SparseMatrix& u, Vec& x) {
  const auto& off = u.row_offsets();
  const auto& col = u.col_indices();
  const auto& val = u.values();
  for (Index i = u.rows(); i-- > 0;) {
    cplx acc = x[static_cast<Eigen::Index>(i)];
    for (Index p = off[i] + 1; p < off[i + 1]; ++p) {
      acc -= val[p] * x[static_cast<Eigen::Index>(col[p])];
    }
    x[static_cast<Eigen::Index>(i)] = acc / val[off[i]];
  }
}

// Adjoint sweeps: (LU)^* y = b  <=>  U^* z = b, L^* y = z.
void upper_adjoint_solve(const SparseMatrix& u, Vec& x) {
  const auto& off = u.row_offsets();
  const auto& col = u.col_indices();
  const auto& val = u.values();
  for (Index i = 0; i < u.rows(); ++i) {
    const cplx xi = x[static_cast<Eigen::Index>(i)] / std::conj(val[off[i]]);
    x[static_cast<Eigen::Index>(i)] = xi;
    for (Index p = off[i] + 1; p < off[i + 1]; ++p) {
      x[static_cast<Eigen::Index>(col[p])] -= std::conj(val[p]) * xi;
    }
  }
}

void lower_adjoint_solve(const SparseMatrix& l, Vec& x) {
  const auto& off = l.row_offsets();
  const auto& col = l.col_indices();
  const auto& val = l.values();
  for (Index i = l.rows(); i-- > 0;) {
    const cplx xi = x[static_cast<Eigen::Index>(i)];
    for (Index p = off[i]; p < off[i + 1]; ++p) {
      x[static_cast<Eigen::Index>(col[p])] -= std::conj(val[p]) * xi;
    }
  }
}

double row_norm(const SparseMatrix& a, Index i) {
  double s = 0.0;
  for (Index p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
    s += std::norm(a.values()[p]);
  }
  return std::sqrt(s);
}

// IKJ variant restricted to the pattern of A.
void ilu0_factor(const SparseMatrix& a, SparseMatrix& lower,
                 SparseMatrix& upper) {
  const Index n = a.rows();
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  std::vector<cplx> lu(a.values());
  std::vector<Index> diag(n);
  constexpr Index kNone = static_cast<Index>(-1);
  std::vector<Index> pos(n, kNone);

  for (Index i = 0; i < n; ++i) {
    diag[i] = kNone;
    for (Index p = off[i]; p < off[i + 1]; ++p) {
      pos[col[p]] = p;
      if (col[p] == i) diag[i] = p;
    }
    if (diag[i] == kNone) zero_pivot(i);
    for (Index p = off[i]; p < off[i + 1] && col[p] < i; ++p) {
      const Index k = col[p];
      lu[p] /= lu[diag[k]];
      const cplx lik = lu[p];
      for (Index q = diag[k] + 1; q < off[k + 1]; ++q) {
        const Index target = pos[col[q]];
        if (target != kNone) lu[target] -= lik * lu[q];
      }
    }
    if (lu[diag[i]] == cplx(0.0)) zero_pivot(i);
    for (Index p = off[i]; p < off[i + 1]; ++p) pos[col[p]] = kNone;
  }

  std::vector<Index> loff(n + 1, 0), uoff(n + 1, 0);
  std::vector<Index> lcol, ucol;
  std::vector<cplx> lval, uval;
  for (Index i = 0; i < n; ++i) {
    for (Index p = off[i]; p < off[i + 1]; ++p) {
      if (col[p] < i) {
        lcol.push_back(col[p]);
        lval.push_back(lu[p]);
      } else {
        ucol.push_back(col[p]);
        uval.push_back(lu[p]);
      }
    }
    loff[i + 1] = lcol.size();
    uoff[i + 1] = ucol.size();
  }
  lower = SparseMatrix(n, n, std::move(loff), std::move(lcol), std::move(lval));
  upper = SparseMatrix(n, n, std::move(uoff), std::move(ucol), std::move(uval));
}

// Dual-threshold ILU (drop by tolerance, then keep the `fill` largest).
void ilut_factor(const SparseMatrix& a, double tau, Index fill,
                 SparseMatrix& lower, SparseMatrix& upper) {
  const Index n = a.rows();
  std::vector<std::vector<std::pair<Index, cplx>>> urows(n);
  std::vector<Index> loff(n + 1, 0), uoff(n + 1, 0);
  std::vector<Index> lcol, ucol;
  std::vector<cplx> lval, uval;

  std::vector<cplx> w(n, 0.0);
  std::vector<char> used(n, 0);
  std::vector<Index> upper_idx;

  auto keep_largest = [](std::vector<std::pair<Index, cplx>>& entries,
                         Index count) {
    if (entries.size() > count) {
      std::stable_sort(entries.begin(), entries.end(),
                       [](const auto& x, const auto& y) {
                         return std::abs(x.second) > std::abs(y.second);
                       });
      entries.resize(count);
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
  };

  for (Index i = 0; i < n; ++i) {
    const double drop = tau * row_norm(a, i);
    std::set<Index> lower_set;
    upper_idx.clear();
    for (Index p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      const Index j = a.col_indices()[p];
      w[j] = a.values()[p];
      used[j] = 1;
      if (j < i) {
        lower_set.insert(j);
      } else {
        upper_idx.push_back(j);
      }
    }
    if (!used[i]) {
      used[i] = 1;
      w[i] = 0.0;
      upper_idx.push_back(i);
    }

    std::vector<std::pair<Index, cplx>> lrow;
    while (!lower_set.empty()) {
      const Index k = *lower_set.begin();
      lower_set.erase(lower_set.begin());
      const cplx lik = w[k] / urows[k].front().second;
      w[k] = 0.0;
      used[k] = 0;
      if (std::abs(lik) < drop) continue;
      lrow.emplace_back(k, lik);
      for (std::size_t q = 1; q < urows[k].size(); ++q) {
        const auto [j, ukj] = urows[k][q];
        if (!used[j]) {
          used[j] = 1;
          w[j] = 0.0;
          if (j < i) {
            lower_set.insert(j);
          } else {
            upper_idx.push_back(j);
          }
        }
        w[j] -= lik * ukj;
      }
    }

    std::vector<std::pair<Index, cplx>> urow;
    cplx pivot = w[i];
    for (Index j : upper_idx) {
      if (j != i && std::abs(w[j]) >= drop) urow.emplace_back(j, w[j]);
      w[j] = 0.0;
      used[j] = 0;
    }
    keep_largest(lrow, fill);
    keep_largest(urow, fill);
    if (pivot == cplx(0.0)) zero_pivot(i);

    urows[i].reserve(urow.size() + 1);
    urows[i].emplace_back(i, pivot);
    urows[i].insert(urows[i].end(), urow.begin(), urow.end());

    for (const auto& [j, v] : lrow) {
      lcol.push_back(j);
      lval.push_back(v);
    }
    for (const auto& [j, v] : urows[i]) {
      ucol.push_back(j);
      uval.push_back(v);
    }
    loff[i + 1] = lcol.size();
    uoff[i + 1] = ucol.size();
  }
  lower = SparseMatrix(n, n, std::move(loff), std::move(lcol), std::move(lval));
  upper = SparseMatrix(n, n, std::move(uoff), std::move(ucol), std::move(uval));
}

}  // namespace

const char* to_string(FactorKind kind) {
  switch (kind) {
    case FactorKind::ExactLU:
      return "exact";
    case FactorKind::ILU0:
      return "ilu0";
    case FactorKind::ILUT:
      return "ilut";
  }
  return "?";
}

FactorKind factor_kind_from_string(const std::string& name) {
  if (name == "exact" || name == "lu") return FactorKind::ExactLU;
  if (name == "ilu0") return FactorKind::ILU0;
  if (name == "ilut") return FactorKind::ILUT;
  throw ConfigError("unknown factorization kind '" + name + "'");
}

Vec Factorization::solve(const Vec& b) const {
  require_dims(static_cast<Index>(b.size()) == n_, "factorization solve");
  if (kind_ == FactorKind::ExactLU) {
    Vec x = exact_->lu.solve(b);
    return x;
  }
  Vec x = b;
  lower_solve(lower_, x);
  upper_solve(upper_, x);
  return x;
}

Vec Factorization::solve_adjoint(const Vec& b) const {
  require_dims(static_cast<Index>(b.size()) == n_, "factorization adjoint solve");
  if (kind_ == FactorKind::ExactLU) {
    Vec x = exact_->lu.adjoint().solve(b);
    return x;
  }
  Vec x = b;
  upper_adjoint_solve(upper_, x);
  lower_adjoint_solve(lower_, x);
  return x;
}

const SparseMatrix& Factorization::lower() const {
  if (kind_ == FactorKind::ExactLU) {
    throw Error("explicit factors are only exposed for incomplete factorizations");
  }
  return lower_;
}

const SparseMatrix& Factorization::upper() const {
  if (kind_ == FactorKind::ExactLU) {
    throw Error("explicit factors are only exposed for incomplete factorizations");
  }
  return upper_;
}

Factorization lu_factor(const SparseMatrix& a) {
  require_dims(a.rows() == a.cols(), "LU of a non-square matrix");
  Factorization f;
  f.kind_ = FactorKind::ExactLU;
  f.n_ = a.rows();
  auto impl = std::make_shared<Factorization::ExactImpl>();
  const EigenSparse m = a.to_eigen();
  impl->lu.analyzePattern(m);
  impl->lu.factorize(m);
  if (impl->lu.info() != Eigen::Success) {
    throw SingularMatrixError("sparse LU failed: " + impl->lu.lastErrorMessage());
  }
  f.exact_ = std::move(impl);
  return f;
}

Factorization ilu(const SparseMatrix& a, const IluOptions& opts) {
  require_dims(a.rows() == a.cols(), "ILU of a non-square matrix");
  const SparseMatrix shifted_a =
      opts.pivot_shift ? shifted(a, -*opts.pivot_shift) : a;
  Factorization f;
  f.kind_ = opts.kind;
  f.n_ = a.rows();
  switch (opts.kind) {
    case FactorKind::ILU0:
      ilu0_factor(shifted_a, f.lower_, f.upper_);
      break;
    case FactorKind::ILUT:
      ilut_factor(shifted_a, opts.drop_tol, opts.fill, f.lower_, f.upper_);
      break;
    case FactorKind::ExactLU:
      return lu_factor(a);
  }
  return f;
}

Factorization factorize(const SparseMatrix& a, const IluOptions& opts) {
  return opts.kind == FactorKind::ExactLU ? lu_factor(a) : ilu(a, opts);
}

}  // namespace hk
