#include "equatorflow/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include <lapacke.h>

namespace eqf {

void canonical_phase(std::vector<cplx>& psi) {
  double mx = 0.0;
  for (const auto& z : psi) mx = std::max(mx, std::abs(z));
  if (mx == 0.0) return;
  for (const auto& z : psi) {
    if (std::abs(z) > 1e-8 * mx) {
      cplx ph = std::conj(z) / std::abs(z);
      for (auto& w : psi) w *= ph;
      return;
    }
  }
}

double residual_norm(const FiberedOperator& op, const EigenPair& pair) {
  const int n = op.dim();
  std::vector<cplx> y(n);
  op.matvec(pair.psi.data(), y.data());
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    cplx r = y[i] - pair.E * pair.psi[i];
    s += std::norm(r);
  }
  return std::sqrt(s);
}

namespace detail {

std::vector<EigenPair> dense_eig(const FiberedOperator& op, bool window,
                                 double e_lo, double e_hi, const EigOptions& opts) {
  const int n = op.dim();
  std::vector<cplx> a = op.dense();
  std::vector<double> w(n);
  std::vector<EigenPair> out;

  if (!window) {
    int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                              reinterpret_cast<lapack_complex_double*>(a.data()),
                              n, w.data());
    if (info != 0) {
      std::ostringstream os;
      os << "zheevd failed, info=" << info << " (n=" << n << ")";
      throw solver_error(os.str());
    }
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
      EigenPair p;
      p.E = w[k];
      p.psi.assign(a.begin() + std::size_t(k) * n, a.begin() + std::size_t(k + 1) * n);
      out.push_back(std::move(p));
    }
  } else {
    std::vector<cplx> z(std::size_t(n) * n);
    std::vector<lapack_int> isuppz(2 * std::size_t(n));
    lapack_int found = 0;
    int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'V', 'L', n,
                              reinterpret_cast<lapack_complex_double*>(a.data()), n,
                              e_lo, e_hi, 0, 0, 0.0, &found, w.data(),
                              reinterpret_cast<lapack_complex_double*>(z.data()), n,
                              isuppz.data());
    if (info != 0) {
      std::ostringstream os;
      os << "zheevr failed, info=" << info << " (n=" << n << ")";
      throw solver_error(os.str());
    }
    out.reserve(found);
    for (int k = 0; k < found; ++k) {
      EigenPair p;
      p.E = w[k];
      p.psi.assign(z.begin() + std::size_t(k) * n, z.begin() + std::size_t(k + 1) * n);
      out.push_back(std::move(p));
    }
  }

  for (auto& p : out) {
    canonical_phase(p.psi);
    p.residual = residual_norm(op, p);
    if (p.residual > opts.tol * (1.0 + std::abs(p.E))) {
      std::ostringstream os;
      os << "dense eigensolve residual " << p.residual << " exceeds tolerance at E="
         << p.E;
      throw solver_error(os.str());
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EigenPair& a_, const EigenPair& b_) { return a_.E < b_.E; });
  return out;
}

} // namespace detail

std::vector<EigenPair> eig_full(const FiberedOperator& op, const EigOptions& opts) {
  return detail::dense_eig(op, false, 0, 0, opts);
}

std::vector<EigenPair> eig_window(const FiberedOperator& op, double e_lo,
                                  double e_hi, const EigOptions& opts) {
  if (!(e_lo < e_hi))
    throw std::invalid_argument("eig_window: require e_lo < e_hi");
  SolverKind k = opts.solver;
  if (k == SolverKind::automatic)
    k = (op.grid.m <= 1200) ? SolverKind::dense : SolverKind::banded;
  if (k == SolverKind::dense)
    return detail::dense_eig(op, true, e_lo, e_hi, opts);
  return detail::band_eig_windows(op, {{e_lo, e_hi}}, opts);
}

std::vector<EigenPair>
eig_windows(const FiberedOperator& op,
            const std::vector<std::pair<double, double>>& windows,
            const EigOptions& opts) {
  for (const auto& w : windows)
    if (!(w.first < w.second))
      throw std::invalid_argument("eig_windows: require lo < hi");
  SolverKind k = opts.solver;
  if (k == SolverKind::automatic)
    k = (op.grid.m <= 1200) ? SolverKind::dense : SolverKind::banded;
  if (k == SolverKind::banded) return detail::band_eig_windows(op, windows, opts);
  // dense: one full solve, select the union
  auto all = detail::dense_eig(op, false, 0, 0, opts);
  std::vector<EigenPair> out;
  for (auto& p : all)
    for (const auto& w : windows)
      if (p.E >= w.first && p.E <= w.second) {
        out.push_back(std::move(p));
        break;
      }
  return out;
}

std::vector<double> eigenvalues_only(const FiberedOperator& op) {
  return detail::band_eigenvalues(op, 0, 0, /*full_range=*/true);
}

} // namespace eqf
