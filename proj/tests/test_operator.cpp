#include <doctest.h>

#include <cmath>
#include <sstream>

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

std::vector<double> plane_wave_spectrum(int m, double h, double xi, double f) {
  std::vector<double> w;
  w.reserve(3 * m);
  for (int k = 0; k < m; ++k) {
    int kk = (k <= (m - 1) / 2) ? k : k - m;
    double s = std::sin(2.0 * M_PI * kk / m) / h;
    double r = std::sqrt(s * s + xi * xi + f * f);
    w.push_back(0.0);
    w.push_back(r);
    w.push_back(-r);
  }
  std::sort(w.begin(), w.end());
  return w;
}

} // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid::make(11.0, 600), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make(11.0, 1), std::invalid_argument);
  auto g = Grid::make(11.0, 601);
  CHECK(g.h == doctest::Approx(22.0 / 601));
  CHECK(g.node(0) == doctest::Approx(-11.0));
  CHECK(g.node(600) == doctest::Approx(11.0 - g.h));
}

TEST_CASE("periodize: linear profile blends across the seam") {
  auto lin = CoriolisProfile::linear();
  auto g = Grid::make(11.0, 301);
  auto fs = periodize(lin, g, 1.0);
  // untouched away from the seam
  for (int i = 0; i < g.m; ++i) {
    double y = g.node(i);
    if (std::abs(y) <= 10.0) CHECK(fs[i] == doctest::Approx(y).epsilon(1e-14));
  }
  // endpoint values and one-sided slopes of the blend (C1 seam)
  // adjacent-sample continuity across the wrap
  double max_jump = 0.0;
  for (int i = 0; i < g.m; ++i)
    max_jump = std::max(max_jump, std::abs(fs[(i + 1) % g.m] - fs[i]));
  // the blend drops ~20 over arclength 2, so slope <= ~16 (cubic peak)
  CHECK(max_jump < 16.0 * g.h);
}

TEST_CASE("periodize: constant profile unchanged") {
  auto c = CoriolisProfile::constant(2.0);
  auto g = Grid::make(11.0, 61);
  auto fs = periodize(c, g, 1.0);
  for (double v : fs) CHECK(v == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("periodize: sgn profile stays continuous at the seam") {
  auto sgn = sgn_tails();
  auto g = Grid::make(11.0, 301);
  auto fs = periodize(sgn, g, 1.0);
  // away from the jump at 0 the adjacent-sample difference is O(h)
  double max_jump = 0.0;
  for (int i = 0; i < g.m; ++i) {
    double y = g.node(i);
    if (std::abs(y) < 0.1) continue;
    max_jump = std::max(max_jump, std::abs(fs[(i + 1) % g.m] - fs[i]));
  }
  CHECK(max_jump < 16.0 * g.h);
}

TEST_CASE("periodize: jump inside the seam buffer is rejected") {
  ProfileOptions o;
  o.range = 16.0;
  auto p = CoriolisProfile::from_segments(
      {Segment::constant(-11.0, -10.5, -1.0), Segment::constant(-10.5, -9.0, 1.0)}, o);
  auto g = Grid::make(11.0, 301);
  CHECK_THROWS_AS(periodize(p, g, 1.0), config_error);
}

TEST_CASE("assemble: Hermitian by construction") {
  auto sgn = sgn_tails();
  auto g = Grid::make(11.0, 61);
  auto op = assemble(sgn, g, 0.7);
  auto a = op.dense();
  const int n = op.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      CHECK(a[std::size_t(j) * n + i] == std::conj(a[std::size_t(i) * n + j]));
  CHECK(op.corners().size() == 2);
}

TEST_CASE("assemble: matvec consistent with dense") {
  auto sgn = sgn_tails();
  auto g = Grid::make(11.0, 31);
  auto op = assemble(sgn, g, -1.3);
  auto a = op.dense();
  const int n = op.dim();
  std::vector<cplx> x(n), y1(n), y2(n, cplx(0));
  for (int i = 0; i < n; ++i) x[i] = cplx(std::sin(i * 0.7), std::cos(i * 1.3));
  op.matvec(x.data(), y1.data());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) y2[i] += a[std::size_t(j) * n + i] * x[j];
  for (int i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) < 1e-12);
}

TEST_CASE("constant profile: plane-wave spectrum is exact") {
  auto c = CoriolisProfile::constant(2.0);
  auto g = Grid::make(11.0, 61);
  for (double xi : {0.0, 1.0}) {
    auto op = assemble(c, g, xi);
    auto w = eigenvalues_only(op);
    std::sort(w.begin(), w.end());
    auto expect = plane_wave_spectrum(g.m, g.h, xi, 2.0);
    REQUIRE(w.size() == expect.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      CHECK(std::abs(w[i] - expect[i]) <= 1e-10 * (1 + std::abs(expect[i])));
  }
}

TEST_CASE("gamma_conjugate equals assemble at -xi, entry for entry") {
  auto sgn = sgn_tails();
  auto g = Grid::make(11.0, 61);
  auto op = assemble(sgn, g, 1.7);
  auto conj_op = gamma_conjugate(op);
  auto neg = assemble(sgn, g, -1.7);
  CHECK(conj_op.xi == neg.xi);
  REQUIRE(conj_op.band().size() == neg.band().size());
  for (std::size_t i = 0; i < neg.band().size(); ++i)
    CHECK(conj_op.band()[i] == neg.band()[i]); // bitwise
  REQUIRE(conj_op.corners().size() == neg.corners().size());
  for (std::size_t i = 0; i < neg.corners().size(); ++i)
    CHECK(conj_op.corners()[i].value == neg.corners()[i].value);
}

TEST_CASE("gamma symmetry of the spectrum") {
  auto lin = CoriolisProfile::linear();
  auto g = Grid::make(11.0, 121);
  for (double xi : {0.4, 2.3}) {
    auto wp = eigenvalues_only(assemble(lin, g, xi));
    auto wm = eigenvalues_only(assemble(lin, g, -xi));
    std::sort(wp.begin(), wp.end());
    std::sort(wm.begin(), wm.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < wp.size(); ++i)
      worst = std::max(worst, std::abs(wp[i] + wm[wm.size() - 1 - i]));
    CHECK(worst < 1e-10);
  }
  // xi = 0 with symmetric f: spectrum symmetric about 0
  auto w0 = eigenvalues_only(assemble(lin, g, 0.0));
  std::sort(w0.begin(), w0.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < w0.size(); ++i)
    worst = std::max(worst, std::abs(w0[i] + w0[w0.size() - 1 - i]));
  CHECK(worst < 1e-10);
}

TEST_CASE("refinement: interior eigenvalue converges at second order") {
  auto lin = CoriolisProfile::linear();
  double target = std::sqrt(5.0);
  auto nearest = [&](int m) {
    auto op = assemble(lin, Grid::make(11.0, m), 1.0);
    auto w = eigenvalues_only(op);
    double best = w[0];
    for (double v : w)
      if (std::abs(v - target) < std::abs(best - target)) best = v;
    return best;
  };
  double e1 = nearest(101), e2 = nearest(201), e3 = nearest(401);
  double r = (e1 - e2) / (e2 - e3);
  CHECK(r > 2.5);
  CHECK(r < 6.5);
}

TEST_CASE("triplet dump round-trips against entry()") {
  auto sgn = sgn_tails();
  auto g = Grid::make(11.0, 31);
  auto op = assemble(sgn, g, 0.9);
  std::ostringstream os;
  dump_triplets(op, os);
  std::istringstream in(os.str());
  int i, j, count = 0;
  double re, im;
  while (in >> i >> j >> re >> im) {
    CHECK(std::abs(op.entry(i, j) - cplx(re, im)) < 1e-15);
    ++count;
  }
  CHECK(count > 0);
  CHECK(count % 2 == 0); // both triangles emitted
}
