#include <doctest.h>

#include <cmath>

#include "equatorflow/eigensolve.hpp"
#include "equatorflow/operator.hpp"

using namespace eqf;

namespace {

CoriolisProfile sgn_tails() {
  ProfileOptions o;
  o.range = 16.0;
  return CoriolisProfile::from_segments(
      {Segment::constant(-1.0, 0.0, -1.0), Segment::constant(0.0, 1.0, 1.0)}, o);
}

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

} // namespace

TEST_CASE("eig_full on a constant profile matches the plane-wave form") {
  auto c = CoriolisProfile::constant(2.0);
  auto g = Grid::make(11.0, 31);
  auto op = assemble(c, g, 1.0);
  auto pairs = eig_full(op);
  REQUIRE(int(pairs.size()) == 3 * g.m);
  std::vector<double> expect;
  for (int k = 0; k < g.m; ++k) {
    int kk = (k <= (g.m - 1) / 2) ? k : k - g.m;
    double s = std::sin(2.0 * M_PI * kk / g.m) / g.h;
    double r = std::sqrt(s * s + 1.0 + 4.0);
    expect.push_back(0.0);
    expect.push_back(r);
    expect.push_back(-r);
  }
  std::sort(expect.begin(), expect.end());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(std::abs(pairs[i].E - expect[i]) <= 1e-10 * (1 + std::abs(expect[i])));
    CHECK(pairs[i].residual <= 1e-9 * (1 + std::abs(pairs[i].E)));
  }
  // eigenvalue count and trace identity
  double trace = 0.0;
  for (const auto& p : pairs) trace += p.E;
  CHECK(std::abs(trace) <= 1e-8 * 3 * g.m);
}

TEST_CASE("eig_window: gap emptiness and flat band") {
  auto c = CoriolisProfile::constant(2.0);
  auto g = Grid::make(11.0, 31);
  auto op = assemble(c, g, 0.0);
  // spectral gap (0, |f|): no eigenvalues in [0.5, 1.5]
  CHECK(eig_window(op, 0.5, 1.5).empty());
  // the flat band: exactly m null modes in [-0.1, 0.1]
  auto zeros = eig_window(op, -0.1, 0.1);
  CHECK(int(zeros.size()) == g.m);
  // full-range window equals eig_full
  auto all = eig_window(op, -1e3, 1e3);
  CHECK(all.size() == eig_full(op).size());
}

TEST_CASE("banded window agrees with dense") {
  auto sgn = sgn_tails();
  auto g = Grid::make(11.0, 121);
  auto op = assemble(sgn, g, -0.8);
  EigOptions dense_o;
  dense_o.solver = SolverKind::dense;
  EigOptions band_o;
  band_o.solver = SolverKind::banded;
  auto wd = eig_window(op, 0.04, 8.6, dense_o);
  auto wb = eig_window(op, 0.04, 8.6, band_o);
  REQUIRE(wd.size() == wb.size());
  for (std::size_t i = 0; i < wd.size(); ++i) {
    CHECK(std::abs(wd[i].E - wb[i].E) < 1e-8);
    CHECK(wb[i].residual <= 1e-9 * (1 + std::abs(wb[i].E)));
    // same vector up to phase
    CHECK(std::abs(dot(wd[i].psi, wb[i].psi)) == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("banded multi-window equals union of windows") {
  auto sgn = sgn_tails();
  auto g = Grid::make(11.0, 121);
  auto op = assemble(sgn, g, 1.2);
  EigOptions band_o;
  band_o.solver = SolverKind::banded;
  auto two = eig_windows(op, {{-8.6, -0.04}, {0.04, 8.6}}, band_o);
  auto neg = eig_window(op, -8.6, -0.04, band_o);
  auto pos = eig_window(op, 0.04, 8.6, band_o);
  CHECK(two.size() == neg.size() + pos.size());
}

TEST_CASE("eigenvector orthogonality") {
  auto lin = CoriolisProfile::linear();
  auto g = Grid::make(11.0, 61);
  auto op = assemble(lin, g, 0.5);
  auto pairs = eig_window(op, 0.04, 8.6);
  for (std::size_t i = 0; i + 1 < pairs.size(); ++i)
    CHECK(std::abs(dot(pairs[i].psi, pairs[i + 1].psi)) < 1e-10);
}

TEST_CASE("residual_norm identities") {
  auto lin = CoriolisProfile::linear();
  auto g = Grid::make(11.0, 61);
  auto op = assemble(lin, g, 0.5);
  auto pairs = eig_window(op, 0.2, 3.0);
  REQUIRE(pairs.size() >= 2);

  // E shifted by delta with the exact psi: residual = delta
  EigenPair shifted = pairs[0];
  shifted.E += 1e-3;
  CHECK(residual_norm(op, shifted) ==
        doctest::Approx(1e-3).epsilon(1e-6));

  // psi mixed with an orthogonal eigenvector: residual = |sin(theta)| * |E2-E1|
  EigenPair mixed = pairs[0];
  double c = 1.0 / std::sqrt(1.01), s = 0.1 / std::sqrt(1.01);
  for (std::size_t q = 0; q < mixed.psi.size(); ++q)
    mixed.psi[q] = c * pairs[0].psi[q] + s * pairs[1].psi[q];
  double expect = s * std::abs(pairs[1].E - pairs[0].E);
  CHECK(residual_norm(op, mixed) == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("canonical phase: first significant component is real positive") {
  std::vector<cplx> v = {cplx(0, 0), cplx(0.3, -0.4), cplx(0.5, 0.2)};
  canonical_phase(v);
  CHECK(v[1].imag() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(v[1].real() > 0);
}

TEST_CASE("windowed count never silently differs from the full count") {
  auto sgn = sgn_tails();
  auto g = Grid::make(11.0, 61);
  for (double xi : {-2.0, 0.3, 4.0}) {
    auto op = assemble(sgn, g, xi);
    auto full = eig_full(op);
    int in_window = 0;
    for (const auto& p : full)
      if (p.E >= 0.1 && p.E <= 5.0) ++in_window;
    EigOptions band_o;
    band_o.solver = SolverKind::banded;
    auto win = eig_window(op, 0.1, 5.0, band_o);
    CHECK(int(win.size()) == in_window);
  }
}
