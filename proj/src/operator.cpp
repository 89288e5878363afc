#include "equatorflow/operator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace eqf {

Grid Grid::make(double L, int m) {
  if (!(L > 0))
    throw std::invalid_argument("grid: L must be positive");
  if (m < 3 || m % 2 == 0)
    throw std::invalid_argument("grid: m must be odd and >= 3");
  Grid g;
  g.L = L;
  g.m = m;
  g.h = 2.0 * L / m;
  return g;
}

std::vector<double> periodize(const CoriolisProfile& profile, const Grid& grid,
                              double w_seam) {
  if (profile.range() < grid.L)
    throw std::invalid_argument("periodize: profile range does not cover [-L, L]");
  if (!(w_seam > 0) || w_seam >= grid.L)
    throw std::invalid_argument("periodize: seam width must be in (0, L)");

  const double L = grid.L;
  for (const auto& j : profile.jumps())
    if (std::abs(j.y) > L - w_seam) {
      std::ostringstream os;
      os << "periodize: jump at y=" << j.y << " lies inside the seam buffer |y| > "
         << L - w_seam;
      throw config_error(os.str());
    }

  // Hermite blend between (L - w, f, f') and (-L + w, f, f') along the wrap.
  const double ya = L - w_seam, yb = -L + w_seam;
  const double fa = profile.evaluate(ya), fb = profile.evaluate(yb);
  const double da = profile.derivative(ya), db = profile.derivative(yb);
  const double span = 2.0 * w_seam;

  std::vector<double> out(grid.m);
  for (int i = 0; i < grid.m; ++i) {
    double y = grid.node(i);
    double s;
    if (y > ya)
      s = y - ya;
    else if (y < yb)
      s = y + L + w_seam;
    else {
      out[i] = profile.evaluate(y);
      // nodes may not coincide with jump ordinates
      for (const auto& j : profile.jumps())
        if (y == j.y) {
          std::ostringstream os;
          os << "grid node " << i << " coincides with the jump at y=" << j.y;
          throw config_error(os.str());
        }
      continue;
    }
    double t = s / span;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    out[i] = h00 * fa + h10 * span * da + h01 * fb + h11 * span * db;
  }
  return out;
}

void FiberedOperator::set_upper(int i, int j, cplx v) {
  if (j - i > band_kd) {
    corners_.push_back({i, j, v});
    return;
  }
  band_[std::size_t(band_kd + i - j) + std::size_t(j) * (band_kd + 1)] += v;
}

FiberedOperator assemble(const CoriolisProfile& profile, const Grid& grid,
                         double xi, const AssembleOptions& opts) {
  FiberedOperator op;
  op.xi = xi;
  op.grid = grid;
  op.f_samples = periodize(profile, grid, opts.w_seam);

  const int m = grid.m;
  op.band_.assign(std::size_t(FiberedOperator::band_kd + 1) * grid.dim(), cplx(0));
  const cplx dcoef(0.0, -0.5 / grid.h); // (1/i) * 1/(2h)

  for (int i = 0; i < m; ++i) {
    op.set_upper(3 * i, 3 * i + 1, xi);
    op.set_upper(3 * i + 1, 3 * i + 2, cplx(0.0, op.f_samples[i]));
    if (opts.gamma_break_epsilon != 0.0)
      op.set_upper(3 * i, 3 * i, opts.gamma_break_epsilon);
    // D_y couples eta_i <-> v_{i+1} and v_i <-> eta_{i+1}; the upper-triangle
    // representatives are (3i, 3(i+1)+2) and (3i+2, 3(i+1)); for i = m-1 the
    // wrap produces the corner entries.
    int ip = (i + 1) % m;
    // A(eta_i, v_ip) = dcoef; conj partner handled by Hermitian storage
    {
      int r = 3 * i, c = 3 * ip + 2;
      if (r < c)
        op.set_upper(r, c, dcoef);
      else
        op.set_upper(c, r, std::conj(dcoef));
    }
    // A(v_i, eta_ip) = dcoef
    {
      int r = 3 * i + 2, c = 3 * ip;
      if (r < c)
        op.set_upper(r, c, dcoef);
      else
        op.set_upper(c, r, std::conj(dcoef));
    }
  }
  return op;
}

FiberedOperator gamma_conjugate(const FiberedOperator& op) {
  // entrywise: out(i,j) = -gamma_i * op(i,j) * gamma_j, gamma = (1,1,-1) per node
  FiberedOperator out;
  out.xi = -op.xi;
  out.grid = op.grid;
  out.f_samples = op.f_samples;
  out.band_ = op.band_;
  out.corners_ = op.corners_;
  auto gamma = [](int idx) { return (idx % 3 == 2) ? -1.0 : 1.0; };
  const int kd = FiberedOperator::band_kd;
  const int n = op.dim();
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - kd); i <= j; ++i)
      out.band_[std::size_t(kd + i - j) + std::size_t(j) * (kd + 1)] *=
          -gamma(i) * gamma(j);
  for (auto& c : out.corners_)
    c.value *= -gamma(c.row) * gamma(c.col);
  return out;
}

void FiberedOperator::matvec(const cplx* x, cplx* y) const {
  const int n = dim();
  const int kd = band_kd;
  std::fill(y, y + n, cplx(0));
  for (int j = 0; j < n; ++j) {
    for (int i = std::max(0, j - kd); i <= j; ++i) {
      cplx a = band_[std::size_t(kd + i - j) + std::size_t(j) * (kd + 1)];
      if (a == cplx(0)) continue;
      y[i] += a * x[j];
      if (i != j) y[j] += std::conj(a) * x[i];
    }
  }
  for (const auto& c : corners_) {
    y[c.row] += c.value * x[c.col];
    y[c.col] += std::conj(c.value) * x[c.row];
  }
}

std::vector<cplx> FiberedOperator::dense() const {
  const int n = dim();
  const int kd = band_kd;
  std::vector<cplx> a(std::size_t(n) * n, cplx(0));
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - kd); i <= j; ++i) {
      cplx v = band_[std::size_t(kd + i - j) + std::size_t(j) * (kd + 1)];
      a[std::size_t(j) * n + i] = v;
      a[std::size_t(i) * n + j] = std::conj(v);
    }
  for (const auto& c : corners_) {
    a[std::size_t(c.col) * n + c.row] = c.value;
    a[std::size_t(c.row) * n + c.col] = std::conj(c.value);
  }
  return a;
}

cplx FiberedOperator::entry(int i, int j) const {
  if (i > j) return std::conj(entry(j, i));
  if (j - i <= band_kd)
    return band_[std::size_t(band_kd + i - j) + std::size_t(j) * (band_kd + 1)];
  for (const auto& c : corners_)
    if (c.row == i && c.col == j) return c.value;
  return cplx(0);
}

double FiberedOperator::inf_norm() const {
  const int n = dim();
  std::vector<double> rowsum(n, 0.0);
  const int kd = band_kd;
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - kd); i <= j; ++i) {
      double a = std::abs(band_[std::size_t(kd + i - j) + std::size_t(j) * (kd + 1)]);
      rowsum[i] += a;
      if (i != j) rowsum[j] += a;
    }
  for (const auto& c : corners_) {
    rowsum[c.row] += std::abs(c.value);
    rowsum[c.col] += std::abs(c.value);
  }
  return *std::max_element(rowsum.begin(), rowsum.end());
}

void dump_triplets(const FiberedOperator& op, std::ostream& os) {
  const int n = op.dim();
  const int kd = FiberedOperator::band_kd;
  os.precision(17);
  auto emit = [&](int i, int j, cplx v) {
    if (v == cplx(0)) return;
    os << i << ' ' << j << ' ' << v.real() << ' ' << v.imag() << '\n';
    if (i != j)
      os << j << ' ' << i << ' ' << v.real() << ' ' << -v.imag() << '\n';
  };
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - kd); i <= j; ++i)
      emit(i, j, op.band()[std::size_t(kd + i - j) + std::size_t(j) * (kd + 1)]);
  for (const auto& c : op.corners())
    emit(c.row, c.col, c.value);
}

} // namespace eqf
