#include "helmkrylov/diagnostics/harmonic_ritz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "helmkrylov/linalg/io.hpp"

namespace hk {

namespace {

void sort_by_modulus(Vec& v) {
  std::vector<cplx> s(v.data(), v.data() + v.size());
  std::stable_sort(s.begin(), s.end(), [](const cplx& a, const cplx& b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma < mb;
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = s[static_cast<std::size_t>(i)];
}

bool is_hermitian(const DenseMatrix& h) {
  const double scale = h.cwiseAbs().maxCoeff();
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

}  // namespace

Vec harmonic_ritz(const DenseMatrix& hbar) {
  const Eigen::Index l = hbar.cols();
  if (l == 0 || hbar.rows() != l + 1) {
    throw DimensionError("harmonic_ritz: expected an (l+1) x l Hessenberg matrix");
  }
  const DenseMatrix h = hbar.topRows(l);
  const double hnorm = h.cwiseAbs().maxCoeff();
  Eigen::FullPivLU<DenseMatrix> lu(h);
  lu.setThreshold(1e-14);
  if (hnorm == 0.0 || !lu.isInvertible()) {
    throw SingularMatrixError("harmonic_ritz: H_l is singular (loss of orthogonality?)");
  }

  Vec out;
  if (is_hermitian(h)) {
    // For Hermitian H the values solve H y = (1/ν) H̄^* H̄ y with a positive
    // definite right-hand side.
    const DenseMatrix hs = 0.5 * (h + h.adjoint());
    const DenseMatrix g = hbar.adjoint() * hbar;
    Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(hs, g, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("harmonic_ritz: eigensolver failed");
    out.resize(l);
    for (Eigen::Index i = 0; i < l; ++i) out[i] = 1.0 / es.eigenvalues()[i];
  } else {
    const double hl = std::abs(hbar(l, l - 1));
    Vec el = Vec::Zero(l);
    el[l - 1] = 1.0;
    const Vec f = h.adjoint().fullPivLu().solve(el);
    DenseMatrix g = h;
    g.col(l - 1) += (hl * hl) * f;
    if (g.imag().cwiseAbs().maxCoeff() == 0.0) {
      Eigen::EigenSolver<Eigen::MatrixXd> es(g.real(), false);
      if (es.info() != Eigen::Success) throw Error("harmonic_ritz: eigensolver failed");
      out = es.eigenvalues();
    } else {
      Eigen::ComplexEigenSolver<DenseMatrix> es(g, false);
      if (es.info() != Eigen::Success) throw Error("harmonic_ritz: eigensolver failed");
      out = es.eigenvalues();
    }
  }
  sort_by_modulus(out);
  return out;
}

Vec minimizing_polynomial_roots(const DenseMatrix& a, const Vec& r0, Index l) {
  using LC = std::complex<long double>;
  using LMat = Eigen::Matrix<LC, Eigen::Dynamic, Eigen::Dynamic>;
  using LVec = Eigen::Matrix<LC, Eigen::Dynamic, 1>;
  if (a.rows() != a.cols() || r0.size() != a.rows()) throw DimensionError("minimizing polynomial");
  if (l == 0) return Vec();
  if (l > kOracleMaxDegree || static_cast<Index>(a.rows()) > kOracleMaxOrder) {
    throw DomainError("minimizing polynomial oracle: l <= 15 and N <= 200 only");
  }
  const Eigen::Index n = a.rows();
  const Eigen::Index L = static_cast<Eigen::Index>(l);
  const LMat al = a.cast<LC>();
  LMat kry(n, L);
  std::vector<long double> scale(static_cast<std::size_t>(L));
  LVec v = r0.cast<LC>();
  for (Eigen::Index j = 0; j < L; ++j) {
    v = al * v;
    const long double nv = v.norm();
    if (nv == 0.0L) throw DomainError("minimizing polynomial: Krylov block degenerate");
    scale[static_cast<std::size_t>(j)] = nv;
    kry.col(j) = v / nv;
  }
  // min ‖r0 + Σ c_j A^j r0‖ over c, columns scaled to unit norm.
  Eigen::ColPivHouseholderQR<LMat> qr(kry);
  if (qr.rank() < L) throw DomainError("minimizing polynomial: Krylov block rank deficient");
  const LVec ct = qr.solve(LVec(-r0.cast<LC>()));

  // Rescale the variable z = s w so the coefficients stay moderate.
  const long double s = std::pow(scale[static_cast<std::size_t>(L - 1)] / r0.cast<LC>().norm(),
                                 1.0L / static_cast<long double>(L));
  std::vector<LC> coef(static_cast<std::size_t>(L + 1));
  coef[0] = 1.0L;
  for (Eigen::Index j = 1; j <= L; ++j) {
    coef[static_cast<std::size_t>(j)] =
        ct[j - 1] / scale[static_cast<std::size_t>(j - 1)] * std::pow(s, static_cast<long double>(j));
  }
  Eigen::Index deg = L;
  while (deg > 0 && std::abs(coef[static_cast<std::size_t>(deg)]) <= 1e-30L) --deg;
  Vec out(deg);
  if (deg == 0) return out;
  LMat comp = LMat::Zero(deg, deg);
  for (Eigen::Index j = 0; j < deg; ++j) {
    comp(0, j) = -coef[static_cast<std::size_t>(deg - 1 - j)] / coef[static_cast<std::size_t>(deg)];
  }
  for (Eigen::Index j = 1; j < deg; ++j) comp(j, j - 1) = 1.0L;
  Eigen::ComplexEigenSolver<LMat> es(comp, false);
  for (Eigen::Index j = 0; j < deg; ++j) {
    // Newton polish on the scaled polynomial.
    LC w = es.eigenvalues()[j];
    for (int it = 0; it < 3; ++it) {
      LC p = coef[static_cast<std::size_t>(deg)], dp = 0.0L;
      for (Eigen::Index c = deg - 1; c >= 0; --c) {
        dp = dp * w + p;
        p = p * w + coef[static_cast<std::size_t>(c)];
      }
      if (std::abs(dp) == 0.0L) break;
      w -= p / dp;
    }
    const LC z = w * s;
    out[j] = cplx(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  sort_by_modulus(out);
  return out;
}

HrMatch match_nearest(const Vec& targets, const Vec& candidates) {
  HrMatch m;
  const std::size_t nt = static_cast<std::size_t>(targets.size());
  m.index.assign(nt, -1);
  m.distance.assign(nt, std::numeric_limits<double>::infinity());
  struct Pair {
    double rel;
    Eigen::Index t, c;
  };
  std::vector<Pair> pairs;
  pairs.reserve(nt * static_cast<std::size_t>(candidates.size()));
  for (Eigen::Index t = 0; t < targets.size(); ++t) {
    const double tm = std::abs(targets[t]);
    for (Eigen::Index c = 0; c < candidates.size(); ++c) {
      const double d = std::abs(candidates[c] - targets[t]);
      pairs.push_back({tm > 0.0 ? d / tm : d, t, c});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.rel != b.rel) return a.rel < b.rel;
    if (a.t != b.t) return a.t < b.t;
    return a.c < b.c;
  });
  std::vector<bool> used(static_cast<std::size_t>(candidates.size()), false);
  std::size_t assigned = 0;
  for (const auto& p : pairs) {
    if (assigned == nt) break;
    if (m.index[static_cast<std::size_t>(p.t)] >= 0 || used[static_cast<std::size_t>(p.c)]) continue;
    m.index[static_cast<std::size_t>(p.t)] = static_cast<long>(p.c);
    m.distance[static_cast<std::size_t>(p.t)] = std::abs(candidates[p.c] - targets[p.t]);
    used[static_cast<std::size_t>(p.c)] = true;
    ++assigned;
  }
  return m;
}

std::optional<Index> HrTrajectory::first_within(Index id, double rel) const {
  const double lam = std::abs(tracked[static_cast<Eigen::Index>(id)]);
  for (const auto& s : snapshots) {
    if (s.match.distance.at(id) < rel * lam) return s.iteration;
  }
  return std::nullopt;
}

void HrTrajectory::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path);
  os << "iter,re,im,matched_eig_id,dist\n";
  for (const auto& s : snapshots) {
    std::vector<long> owner(static_cast<std::size_t>(s.values.size()), -1);
    for (std::size_t t = 0; t < s.match.index.size(); ++t) {
      if (s.match.index[t] >= 0) owner[static_cast<std::size_t>(s.match.index[t])] = static_cast<long>(t);
    }
    for (Eigen::Index i = 0; i < s.values.size(); ++i) {
      const long id = owner[static_cast<std::size_t>(i)];
      double d = std::numeric_limits<double>::infinity();
      if (id >= 0) {
        d = s.match.distance[static_cast<std::size_t>(id)];
      } else {
        for (Eigen::Index t = 0; t < tracked.size(); ++t) d = std::min(d, std::abs(s.values[i] - tracked[t]));
      }
      os << s.iteration << ',' << format_double(s.values[i].real()) << ','
         << format_double(s.values[i].imag()) << ',' << id << ','
         << (std::isfinite(d) ? format_double(d) : std::string("nan")) << '\n';
    }
  }
}

HrTrajectory hr_trajectory(const GmresTrace& trace, const std::vector<Index>& iterations,
                           const Vec& tracked) {
  HrTrajectory out;
  out.tracked = tracked;
  for (Index l : iterations) {
    if (l == 0) continue;
    if (!trace.has_snapshot(l)) throw DomainError("hr_trajectory: no Hessenberg for iteration " + std::to_string(l));
    HrSnapshot s;
    s.iteration = l;
    s.values = harmonic_ritz(trace.hessenberg(l));
    s.match = match_nearest(tracked, s.values);
    out.snapshots.push_back(std::move(s));
  }
  return out;
}

}  // namespace hk
