#include "equatorflow/filter.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include <fftw3.h>
#include <lapacke.h>

namespace eqf {

namespace {

// FFTW plans are cached per transform length; plan creation is not
// thread-safe, execution on caller-owned buffers is.
class FftCache {
public:
  static fftw_plan plan_for(int n) {
    static FftCache cache;
    std::lock_guard<std::mutex> lock(cache.mu_);
    auto it = cache.plans_.find(n);
    if (it != cache.plans_.end()) return it->second;
    std::vector<fftw_complex> in(n), out(n);
    fftw_plan p = fftw_plan_dft_1d(n, in.data(), out.data(), FFTW_FORWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.plans_.emplace(n, p);
    return p;
  }

private:
  std::mutex mu_;
  std::unordered_map<int, fftw_plan> plans_;
};

bool node_interior(const Grid& g, int i, double window) {
  return std::abs(g.node(i)) < window * g.L;
}

} // namespace

int fourier_band_size(int m, double band_fraction) {
  // highest-|k| band, symmetric in +-k: |k| >= k_min with 2*floor(m*frac/2)
  // members (m odd)
  return 2 * int(std::floor(0.5 * band_fraction * m));
}

std::pair<bool, double> wall_filter(const EigenPair& pair, const Grid& grid,
                                    const FilterParams& p) {
  double interior = 0.0, total = 0.0;
  for (int i = 0; i < grid.m; ++i) {
    double a = std::norm(pair.psi[3 * i]) + std::norm(pair.psi[3 * i + 1]) +
               std::norm(pair.psi[3 * i + 2]);
    total += a;
    if (node_interior(grid, i, p.interior_window)) interior += a;
  }
  double frac = (total > 0) ? interior / total : 0.0;
  return {frac > p.wall_keep_threshold, frac};
}

std::pair<bool, double> fourier_filter(const EigenPair& pair, const Grid& grid,
                                       const FilterParams& p) {
  const int m = grid.m;
  const int jmax = (m - 1) / 2;
  const int band = fourier_band_size(m, p.band_fraction);
  const int jmin = jmax - band / 2 + 1; // |j| >= jmin is the rejection band

  fftw_plan plan = FftCache::plan_for(m);
  std::vector<cplx> in(m), out(m);
  double band_mass = 0.0, total = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < m; ++i) in[i] = pair.psi[3 * i + c];
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    for (int j = 0; j < m; ++j) {
      int k = (j <= jmax) ? j : j - m; // aliased symmetric wavenumber
      double a = std::norm(out[j]);
      total += a;
      if (std::abs(k) >= jmin) band_mass += a;
    }
  }
  double band_frac = (total > 0) ? band_mass / total : 0.0;
  return {band_frac < p.fourier_reject_threshold, 1.0 - band_frac};
}

void disentangle_degenerate(std::vector<EigenPair>& pairs, const Grid& grid,
                            const FilterParams& p) {
  const std::size_t n = pairs.size();
  if (n < 2) return;
  // pairs must be in ascending eigenvalue order
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n &&
           pairs[j].E - pairs[j - 1].E < p.cluster_tol * (1.0 + std::abs(pairs[j].E)))
      ++j;
    const std::size_t s = j - i;
    if (s >= 2) {
      const int dim = grid.dim();
      // G_{ab} = <psi_a | P_interior | psi_b>
      std::vector<cplx> G(s * s, cplx(0));
      for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = a; b < s; ++b) {
          cplx acc(0);
          for (int q = 0; q < grid.m; ++q) {
            if (!node_interior(grid, q, p.interior_window)) continue;
            for (int c = 0; c < 3; ++c)
              acc += std::conj(pairs[i + a].psi[3 * q + c]) *
                     pairs[i + b].psi[3 * q + c];
          }
          G[b * s + a] = acc;
          G[a * s + b] = std::conj(acc);
        }
      std::vector<double> ev(s);
      int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', int(s),
                                reinterpret_cast<lapack_complex_double*>(G.data()),
                                int(s), ev.data());
      if (info != 0) throw solver_error("disentangle: zheevd failed");
      std::vector<std::vector<cplx>> rotated(s, std::vector<cplx>(dim, cplx(0)));
      for (std::size_t b = 0; b < s; ++b)
        for (std::size_t a = 0; a < s; ++a) {
          cplx u = G[b * s + a];
          if (u == cplx(0)) continue;
          const auto& src = pairs[i + a].psi;
          auto& dst = rotated[b];
          for (int q = 0; q < dim; ++q) dst[q] += u * src[q];
        }
      for (std::size_t b = 0; b < s; ++b) {
        pairs[i + b].psi = std::move(rotated[b]);
        canonical_phase(pairs[i + b].psi);
      }
    }
    i = j;
  }
}

std::pair<std::vector<EigenPair>, std::vector<FilterDiagnostics>>
apply_filters(std::vector<EigenPair> pairs, const Grid& grid,
              const FilterParams& p) {
  disentangle_degenerate(pairs, grid, p);
  std::vector<FilterDiagnostics> diags(pairs.size());
  std::vector<EigenPair> kept;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [wall_ok, interior] = wall_filter(pairs[k], grid, p);
    auto [fourier_ok, lowfreq] = fourier_filter(pairs[k], grid, p);
    FilterDiagnostics d;
    d.interior_fraction = interior;
    d.lowfreq_fraction = lowfreq;
    d.kept = wall_ok && fourier_ok;
    d.reject_reason = d.kept ? RejectReason::none
                             : (!wall_ok ? RejectReason::wall : RejectReason::fourier);
    diags[k] = d;
    if (d.kept) kept.push_back(std::move(pairs[k]));
  }
  return {std::move(kept), std::move(diags)};
}

} // namespace eqf
