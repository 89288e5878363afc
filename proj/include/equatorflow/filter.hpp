#pragma once

#include <vector>

#include "equatorflow/eigensolve.hpp"
#include "equatorflow/operator.hpp"

namespace eqf {

enum class RejectReason { none, wall, fourier };

struct FilterDiagnostics {
  double interior_fraction = 0.0; // |psi|^2 mass on nodes with |y| < window*L
  double lowfreq_fraction = 0.0;  // DFT mass outside the rejection band
  bool kept = false;
  RejectReason reject_reason = RejectReason::none;
};

struct FilterParams {
  double interior_window = 0.9;      // fraction of L counted as interior
  double wall_keep_threshold = 0.5;  // keep iff interior mass > this
  double band_fraction = 0.2;        // highest-|k| fifth of wavenumbers
  double fourier_reject_threshold = 0.9; // reject iff band mass >= this
  // eigenvalue gap below which a cluster is treated as degenerate and its
  // basis rotated to diagonalize the interior-mass form before filtering
  double cluster_tol = 1e-9;
};

// interior |psi|^2 mass; keep iff strictly greater than the threshold
std::pair<bool, double> wall_filter(const EigenPair& pair, const Grid& grid,
                                    const FilterParams& p = {});

// DFT band mass in the highest-|k| fifth of the discrete wavenumbers,
// concatenated over the three components; reject iff >= threshold.
// Returns (keep, lowfreq_fraction).
std::pair<bool, double> fourier_filter(const EigenPair& pair, const Grid& grid,
                                       const FilterParams& p = {});

// Rotates the basis within each near-degenerate eigenvalue cluster so the
// interior-mass quadratic form is diagonal.  The eigensolver returns an
// arbitrary basis for numerically degenerate pairs (a trapped mode and its
// periodization double can be degenerate to machine precision); the rotation
// makes the filters see the physically distinct members.
void disentangle_degenerate(std::vector<EigenPair>& pairs, const Grid& grid,
                            const FilterParams& p = {});

// disentangle, then wall filter, then Fourier filter; diagnostics for every
// input pair, kept pairs returned in eigenvalue order.
std::pair<std::vector<EigenPair>, std::vector<FilterDiagnostics>>
apply_filters(std::vector<EigenPair> pairs, const Grid& grid,
              const FilterParams& p = {});

// number of rejection-band wavenumbers for an m-point grid (aliased +-pairs)
int fourier_band_size(int m, double band_fraction = 0.2);

} // namespace eqf
