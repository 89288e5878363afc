#pragma once

#include <array>
#include <vector>

#include "equatorflow/eigensolve.hpp"
#include "equatorflow/operator.hpp"
#include "equatorflow/profile.hpp"

namespace eqf {

// Exact Kelvin branch: E = xi with eigenvector (e^{-F}, e^{-F}, 0).
double kelvin_energy(double xi);
std::vector<cplx> kelvin_eigvec(const CoriolisProfile& profile, const Grid& grid);

// Local two-value jump mode at a single discontinuity.
struct JumpModePrediction {
  bool admissible = false; // requires -f_odd * xi > 0
  double E = 0.0;          // -xi f_o / sqrt(f_e^2 + xi^2)
  double kappa_plus = 0.0, kappa_minus = 0.0;
  double f_plus = 0.0, f_minus = 0.0, xi = 0.0;

  // kappa_+ + kappa_- + (xi/E)(f_+ - f_-); zero for the admissible mode
  double kappa_identity() const;

  // piecewise-exponential eigenvector sampled on the grid, centered at y0,
  // unit norm, v(y0) real positive
  std::vector<cplx> sample(const Grid& grid, double y0) const;
};

JumpModePrediction jump_dispersion(double f_plus, double f_minus, double xi);

// Unique crossing of E = -xi: xi0 = -||f e^{-F}|| / ||e^{-F}||, by adaptive
// quadrature over the representation range.
double yanai_crossing(const CoriolisProfile& profile, double quad_tol = 1e-10);

// Symbol eigenvalues of the constant-f bulk Hamiltonian.
std::array<double, 3> bulk_bands(double f, double xi, double zeta);

// (sf_bec, sf_thm) = (2, 2 - J_L(alpha) + J_R(alpha)).
std::pair<int, int> predicted_flow(const CoriolisProfile& profile, double alpha);

// Discrete residuals of the eliminated scalar problem
//   (-d^2/dy^2 + f^2 + (xi/E) f') v = (E^2 - xi^2) v
// plus the jump relations -[v'](y_j) + (xi/E)[f](y_j) v(y_j) = 0 and the
// (eta,u) reconstruction mismatch.
struct SturmResidual {
  double ode_residual = 0.0;              // scaled; O(h^2) for true eigenpairs
  std::vector<double> jump_residuals;     // scaled; O(h)
  double etau_mismatch = 0.0;             // relative, near machine for certified pairs
  int nodes_used = 0;
};

SturmResidual sturm_residual(const CoriolisProfile& profile, const Grid& grid,
                             double xi, const EigenPair& pair,
                             double w_seam = 1.0);

} // namespace eqf
