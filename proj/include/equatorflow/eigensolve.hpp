#pragma once

#include <vector>

#include "equatorflow/common.hpp"
#include "equatorflow/operator.hpp"

namespace eqf {

// One certified eigenpair of a fiber operator.
struct EigenPair {
  double E = 0.0;
  std::vector<cplx> psi; // unit l2 norm, canonical phase
  double residual = 0.0; // ||(H - E) psi||_2, recomputed after the solve
};

enum class SolverKind {
  automatic, // dense for m <= 1200, banded above
  dense,
  banded,
};

struct EigOptions {
  double tol = 1e-9;                          // residual <= tol * (1 + |E|)
  SolverKind solver = SolverKind::automatic;
  int max_refine = 4;                          // inverse-iteration escalations
};

// Full spectrum with eigenvectors (dense LAPACK path).
std::vector<EigenPair> eig_full(const FiberedOperator& op, const EigOptions& opts = {});

// All eigenpairs with E in [e_lo, e_hi].  The banded path verifies the count
// against Sturm-sequence inertia, so a missed eigenvalue is a hard error.
std::vector<EigenPair> eig_window(const FiberedOperator& op, double e_lo,
                                  double e_hi, const EigOptions& opts = {});

// Union of disjoint windows in one pass (one band reduction on the banded
// path; dense solves once and selects).
std::vector<EigenPair> eig_windows(const FiberedOperator& op,
                                   const std::vector<std::pair<double, double>>& windows,
                                   const EigOptions& opts = {});

// All 3m eigenvalues, no vectors; cheap banded reduction.
std::vector<double> eigenvalues_only(const FiberedOperator& op);

// Exact recomputation of ||(H - E) psi||.
double residual_norm(const FiberedOperator& op, const EigenPair& pair);

// Rotates psi so its first component with magnitude > 1e-8 * max is real
// positive; determinism of downstream consumers relies on this.
void canonical_phase(std::vector<cplx>& psi);

namespace detail {
// banded backend (band_eigensolve.cpp)
std::vector<double> band_eigenvalues(const FiberedOperator& op, double e_lo,
                                     double e_hi, bool full_range);
std::vector<EigenPair>
band_eig_windows(const FiberedOperator& op,
                 const std::vector<std::pair<double, double>>& windows,
                 const EigOptions& opts);
// dense backend (eigensolve.cpp)
std::vector<EigenPair> dense_eig(const FiberedOperator& op, bool window,
                                 double e_lo, double e_hi, const EigOptions& opts);
} // namespace detail

} // namespace eqf
