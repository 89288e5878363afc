#pragma once

#include <iosfwd>
#include <vector>

#include "equatorflow/common.hpp"
#include "equatorflow/profile.hpp"

namespace eqf {

// Uniform periodic grid on [-L, L): nodes y_i = -L + i*h, h = 2L/m, with the
// wrap y_m == y_0.  m must be odd so no node lands on y = 0 and the xi = 0
// symbol spectrum stays symmetric.
struct Grid {
  double L = 11.0;
  int m = 601;
  double h = 0.0;

  static Grid make(double L, int m);
  double node(int i) const { return -L + h * i; }
  int dim() const { return 3 * m; }
};

struct AssembleOptions {
  double w_seam = 1.0; // half-width of the periodization blend at the wrap
  // Test hook: adds this value to the eta-component diagonal, which breaks
  // the (xi,E) -> (-xi,-E) symmetry while keeping the matrix Hermitian.
  double gamma_break_epsilon = 0.0;
};

// The discretized fiber Hamiltonian at one wavenumber xi: a 3m x 3m complex
// Hermitian matrix in component-interleaved ordering (eta_i, u_i, v_i).
// Stored as the upper band (bandwidth 5) plus the periodic corner entries,
// so Hermiticity is structural.
class FiberedOperator {
public:
  double xi = 0.0;
  Grid grid;
  std::vector<double> f_samples; // periodized one-sided samples of f

  int dim() const { return grid.dim(); }
  static constexpr int band_kd = 5;

  // upper band, LAPACK layout: band_[(kd + i - j) + j*(kd+1)] = A(i,j),
  // for j-kd <= i <= j
  const std::vector<cplx>& band() const { return band_; }

  struct Corner {
    int row, col; // row < col
    cplx value;
  };
  const std::vector<Corner>& corners() const { return corners_; }

  void matvec(const cplx* x, cplx* y) const;
  std::vector<cplx> dense() const; // column-major dim x dim
  cplx entry(int i, int j) const;  // O(1), any (i,j)
  double inf_norm() const;

  friend FiberedOperator assemble(const CoriolisProfile&, const Grid&, double,
                                  const AssembleOptions&);
  friend FiberedOperator gamma_conjugate(const FiberedOperator&);

private:
  std::vector<cplx> band_;
  std::vector<Corner> corners_;
  void set_upper(int i, int j, cplx v);
};

// Samples the profile at the grid nodes and replaces the values inside the
// seam buffer by the C1 cubic Hermite blend across the wrap, so the
// periodized profile has no artificial jump at y = +-L.
std::vector<double> periodize(const CoriolisProfile& profile, const Grid& grid,
                              double w_seam = 1.0);

FiberedOperator assemble(const CoriolisProfile& profile, const Grid& grid,
                         double xi, const AssembleOptions& opts = {});

// -Gamma H(xi) Gamma with Gamma = Diag(1,1,-1); equals assemble(..., -xi)
// entry for entry.
FiberedOperator gamma_conjugate(const FiberedOperator& op);

// Sparse triplet dump (row col re im), one entry per line, both triangles.
void dump_triplets(const FiberedOperator& op, std::ostream& os);

} // namespace eqf
