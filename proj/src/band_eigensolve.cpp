#include "equatorflow/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <lapacke.h>

// Windowed eigensolve for the periodic band operator.  The periodic corners
// are removed by reordering the ring nodes as 0, m-1, 1, m-2, ... (fold
// ordering), which turns the cyclic adjacency into a path with node distance
// <= 2, i.e. a genuine Hermitian band of scalar bandwidth 8.  The band is
// reduced to tridiagonal form (zhbtrd), window eigenvalues come from Sturm
// bisection (dstebz, exact counts), and eigenvectors from inverse iteration
// with the banded LU of the shifted operator.

namespace eqf {
namespace detail {

namespace {

constexpr int fold_kd = 8;

int fold_pos(int i, int m) { return (2 * i <= m - 1) ? 2 * i : 2 * (m - 1 - i) + 1; }

struct FoldedBand {
  int n = 0;
  std::vector<cplx> ab; // Hermitian upper band, ldab = fold_kd + 1
  double scale = 1.0;   // inf-norm estimate

  void matvec(const cplx* x, cplx* y) const {
    std::fill(y, y + n, cplx(0));
    for (int j = 0; j < n; ++j)
      for (int i = std::max(0, j - fold_kd); i <= j; ++i) {
        cplx a = ab[std::size_t(fold_kd + i - j) + std::size_t(j) * (fold_kd + 1)];
        if (a == cplx(0)) continue;
        y[i] += a * x[j];
        if (i != j) y[j] += std::conj(a) * x[i];
      }
  }
};

FoldedBand fold(const FiberedOperator& op) {
  const int m = op.grid.m;
  const int n = op.dim();
  FoldedBand fb;
  fb.n = n;
  fb.ab.assign(std::size_t(fold_kd + 1) * n, cplx(0));
  fb.scale = op.inf_norm();

  auto put = [&](int i, int j, cplx v) {
    // natural (i, j), i <= j; map to folded coordinates
    int fi = 3 * fold_pos(i / 3, m) + i % 3;
    int fj = 3 * fold_pos(j / 3, m) + j % 3;
    if (fi > fj) {
      std::swap(fi, fj);
      v = std::conj(v);
    }
    if (fj - fi > fold_kd)
      throw solver_error("fold: bandwidth violation (internal)");
    fb.ab[std::size_t(fold_kd + fi - fj) + std::size_t(fj) * (fold_kd + 1)] = v;
  };

  const int kd = FiberedOperator::band_kd;
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - kd); i <= j; ++i) {
      cplx v = op.band()[std::size_t(kd + i - j) + std::size_t(j) * (kd + 1)];
      if (v != cplx(0) || i == j) put(i, j, v);
    }
  for (const auto& c : op.corners()) put(c.row, c.col, c.value);
  return fb;
}

// tridiagonal reduction of a copy of the folded band
void tridiagonalize(const FoldedBand& fb, std::vector<double>& d,
                    std::vector<double>& e) {
  std::vector<cplx> work = fb.ab;
  d.resize(fb.n);
  e.resize(std::max(0, fb.n - 1));
  int info = LAPACKE_zhbtrd(LAPACK_COL_MAJOR, 'N', 'U', fb.n, fold_kd,
                            reinterpret_cast<lapack_complex_double*>(work.data()),
                            fold_kd + 1, d.data(), e.data(), nullptr, 1);
  if (info != 0) {
    std::ostringstream os;
    os << "zhbtrd failed, info=" << info;
    throw solver_error(os.str());
  }
}

struct GBFactor {
  int n = 0;
  std::vector<cplx> ab; // zgbtrf storage, ldab = 2*kl+ku+1
  std::vector<lapack_int> ipiv;

  static GBFactor make(const FoldedBand& fb, double shift) {
    const int kl = fold_kd, ku = fold_kd, ldab = 2 * kl + ku + 1;
    GBFactor f;
    f.n = fb.n;
    f.ab.assign(std::size_t(ldab) * fb.n, cplx(0));
    f.ipiv.resize(fb.n);
    for (int j = 0; j < fb.n; ++j)
      for (int i = std::max(0, j - fold_kd); i <= j; ++i) {
        cplx v = fb.ab[std::size_t(fold_kd + i - j) + std::size_t(j) * (fold_kd + 1)];
        if (i == j) v -= shift;
        f.ab[std::size_t(kl + ku + i - j) + std::size_t(j) * ldab] = v;
        if (i != j)
          f.ab[std::size_t(kl + ku + j - i) + std::size_t(i) * ldab] = std::conj(v);
      }
    int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, f.n, f.n, kl, ku,
                              reinterpret_cast<lapack_complex_double*>(f.ab.data()),
                              ldab, f.ipiv.data());
    if (info < 0) {
      std::ostringstream os;
      os << "zgbtrf failed, info=" << info;
      throw solver_error(os.str());
    }
    // info > 0 (exact singularity) is handled by the caller nudging the shift
    return f;
  }

  void solve(std::vector<cplx>& x) const {
    const int kl = fold_kd, ku = fold_kd, ldab = 2 * kl + ku + 1;
    int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1,
                              reinterpret_cast<const lapack_complex_double*>(ab.data()),
                              ldab, ipiv.data(),
                              reinterpret_cast<lapack_complex_double*>(x.data()), n);
    if (info != 0) throw solver_error("zgbtrs failed");
  }
};

uint64_t splitmix(uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void random_start(std::vector<cplx>& v, uint64_t seed) {
  uint64_t s = seed * 0x2545f4914f6cdd1dULL + 1;
  for (auto& z : v) {
    double re = double(splitmix(s) >> 11) / double(1ULL << 53) - 0.5;
    double im = double(splitmix(s) >> 11) / double(1ULL << 53) - 0.5;
    z = cplx(re, im);
  }
}

double normalize(std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  s = std::sqrt(s);
  if (s > 0)
    for (auto& z : v) z /= s;
  return s;
}

void orthogonalize(std::vector<cplx>& v, const std::vector<std::vector<cplx>>& basis,
                   const std::vector<int>& against) {
  for (int pass = 0; pass < 2; ++pass)
    for (int k : against) {
      const auto& b = basis[k];
      cplx c(0);
      for (std::size_t i = 0; i < v.size(); ++i) c += std::conj(b[i]) * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
}

} // namespace

std::vector<double> band_eigenvalues(const FiberedOperator& op, double e_lo,
                                     double e_hi, bool full_range) {
  FoldedBand fb = fold(op);
  std::vector<double> d, e;
  tridiagonalize(fb, d, e);
  if (full_range) {
    int info = LAPACKE_dsterf(fb.n, d.data(), e.data());
    if (info != 0) throw solver_error("dsterf failed");
    return d;
  }
  std::vector<double> w(fb.n);
  std::vector<lapack_int> iblock(fb.n), isplit(fb.n);
  lapack_int found = 0, nsplit = 0;
  int info = LAPACKE_dstebz('V', 'E', fb.n, e_lo, e_hi, 0, 0, 0.0, d.data(), e.data(),
                            &found, &nsplit, w.data(), iblock.data(), isplit.data());
  if (info != 0) {
    std::ostringstream os;
    os << "dstebz failed, info=" << info;
    throw solver_error(os.str());
  }
  w.resize(found);
  return w;
}

std::vector<EigenPair>
band_eig_windows(const FiberedOperator& op,
                 const std::vector<std::pair<double, double>>& windows,
                 const EigOptions& opts) {
  FoldedBand fb = fold(op);
  std::vector<double> d, e;
  tridiagonalize(fb, d, e);

  std::vector<double> w;
  for (const auto& win : windows) {
    std::vector<double> wk(fb.n);
    std::vector<lapack_int> iblock(fb.n), isplit(fb.n);
    lapack_int found_k = 0, nsplit = 0;
    int info = LAPACKE_dstebz('V', 'E', fb.n, win.first, win.second, 0, 0, 0.0,
                              d.data(), e.data(), &found_k, &nsplit, wk.data(),
                              iblock.data(), isplit.data());
    if (info != 0) {
      std::ostringstream os;
      os << "dstebz failed, info=" << info << " (window [" << win.first << ","
         << win.second << "])";
      throw solver_error(os.str());
    }
    w.insert(w.end(), wk.begin(), wk.begin() + found_k);
  }
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end()); // overlapping windows
  const int found = int(w.size());

  const int n = fb.n;
  const int m = op.grid.m;
  const double scale = std::max(1.0, fb.scale);

  std::vector<std::vector<cplx>> vecs(found);
  std::vector<cplx> x(n), r(n);

  for (int k = 0; k < found; ++k) {
    // neighbors to orthogonalize against: previous eigenvalues closer than
    // the inverse-iteration discrimination limit
    std::vector<int> cluster;
    for (int j = k - 1; j >= 0; --j) {
      if (w[k] - w[j] < 1e-5 * scale)
        cluster.push_back(j);
      else
        break;
    }

    double shift = w[k];
    bool certified = false;
    double res = 0.0;
    int iters = 0;
    for (int attempt = 0; attempt <= opts.max_refine && !certified; ++attempt) {
      double nudge = (attempt == 0 && !cluster.empty())
                         ? 1e-11 * scale * (1 + int(cluster.size()))
                         : 0.0;
      GBFactor f = GBFactor::make(fb, shift + nudge);
      x.assign(n, cplx(0));
      random_start(x, uint64_t(k) * 1315423911ULL + uint64_t(attempt));
      if (!cluster.empty()) orthogonalize(x, vecs, cluster);
      normalize(x);
      for (int it = 0; it < 3 + 2 * attempt; ++it) {
        f.solve(x);
        if (!cluster.empty()) orthogonalize(x, vecs, cluster);
        if (normalize(x) == 0.0) random_start(x, uint64_t(k) * 77 + it), normalize(x);
        ++iters;
        // Rayleigh quotient and residual on the folded band
        fb.matvec(x.data(), r.data());
        double rq = 0.0;
        for (int i = 0; i < n; ++i) rq += (std::conj(x[i]) * r[i]).real();
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::norm(r[i] - rq * x[i]);
        res = std::sqrt(s);
        if (res <= 0.5 * opts.tol * (1.0 + std::abs(rq))) {
          w[k] = rq;
          certified = true;
          break;
        }
        if (it >= 1) shift = rq; // Rayleigh shift for the next factorization
      }
    }
    if (!certified) {
      std::ostringstream os;
      os << "inverse iteration failed to certify eigenvalue " << k << " (E~" << w[k]
         << ", residual " << res << ", " << iters << " iterations)";
      throw solver_error(os.str());
    }
    vecs[k] = x;
  }

  // duplicate-vector guard within near-degenerate groups
  for (int k = 1; k < found; ++k) {
    if (w[k] - w[k - 1] > 1e-6 * scale) continue;
    cplx ov(0);
    for (int i = 0; i < n; ++i) ov += std::conj(vecs[k - 1][i]) * vecs[k][i];
    if (std::abs(ov) > 1e-6) {
      std::ostringstream os;
      os << "inverse iteration produced duplicate eigenvectors at E=" << w[k]
         << " (inertia count says " << found << " in window)";
      throw solver_error(os.str());
    }
  }

  // unfold to the natural node ordering and certify against the true operator
  std::vector<EigenPair> out(found);
  for (int k = 0; k < found; ++k) {
    EigenPair p;
    p.E = w[k];
    p.psi.assign(std::size_t(3) * m, cplx(0));
    for (int i = 0; i < m; ++i) {
      int fp = fold_pos(i, m);
      for (int c = 0; c < 3; ++c) p.psi[3 * i + c] = vecs[k][3 * fp + c];
    }
    canonical_phase(p.psi);
    p.residual = residual_norm(op, p);
    if (p.residual > opts.tol * (1.0 + std::abs(p.E))) {
      std::ostringstream os;
      os << "banded eigensolve residual " << p.residual
         << " exceeds tolerance at E=" << p.E;
      throw solver_error(os.str());
    }
    out[k] = std::move(p);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EigenPair& a, const EigenPair& b) { return a.E < b.E; });
  return out;
}

} // namespace detail
} // namespace eqf
