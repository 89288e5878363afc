#include "equatorflow/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace eqf {

double kelvin_energy(double xi) { return xi; }

std::vector<cplx> kelvin_eigvec(const CoriolisProfile& profile, const Grid& grid) {
  std::vector<cplx> psi(grid.dim(), cplx(0));
  double norm2 = 0.0;
  for (int i = 0; i < grid.m; ++i) {
    double g = std::exp(-profile.antiderivative(grid.node(i)));
    psi[3 * i] = g;
    psi[3 * i + 1] = g;
    norm2 += 2.0 * g * g;
  }
  double inv = 1.0 / std::sqrt(norm2);
  for (auto& z : psi) z *= inv;
  return psi;
}

double JumpModePrediction::kappa_identity() const {
  return kappa_plus + kappa_minus + (xi / E) * (f_plus - f_minus);
}

JumpModePrediction jump_dispersion(double f_plus, double f_minus, double xi) {
  JumpModePrediction p;
  p.f_plus = f_plus;
  p.f_minus = f_minus;
  p.xi = xi;
  double fo = 0.5 * (f_plus - f_minus);
  double fe = 0.5 * (f_plus + f_minus);
  if (fo == 0.0)
    throw std::invalid_argument("jump_dispersion: f_odd must be nonzero");
  if (!(-fo * xi > 0.0)) {
    p.admissible = false; // no trapped mode for this sign combination
    return p;
  }
  p.admissible = true;
  p.E = -xi * fo / std::sqrt(fe * fe + xi * xi);
  p.kappa_plus = std::sqrt(f_plus * f_plus + xi * xi - p.E * p.E);
  p.kappa_minus = std::sqrt(f_minus * f_minus + xi * xi - p.E * p.E);
  return p;
}

std::vector<cplx> JumpModePrediction::sample(const Grid& grid, double y0) const {
  if (!admissible)
    throw std::invalid_argument("jump mode sample: prediction is not admissible");
  const double denom = E * E - xi * xi;
  const cplx eta(0.0, (E * kappa_plus + xi * f_plus) / denom);
  const cplx u_plus(0.0, (xi * kappa_plus + E * f_plus) / denom);
  const cplx u_minus(0.0, (-xi * kappa_minus + E * f_minus) / denom);

  std::vector<cplx> psi(grid.dim(), cplx(0));
  double norm2 = 0.0;
  for (int i = 0; i < grid.m; ++i) {
    double y = grid.node(i);
    double ex = (y > y0) ? std::exp(-kappa_plus * (y - y0))
                         : std::exp(kappa_minus * (y - y0));
    psi[3 * i] = eta * ex;
    psi[3 * i + 1] = (y > y0 ? u_plus : u_minus) * ex;
    psi[3 * i + 2] = ex;
    norm2 += std::norm(psi[3 * i]) + std::norm(psi[3 * i + 1]) + ex * ex;
  }
  double inv = 1.0 / std::sqrt(norm2);
  for (auto& z : psi) z *= inv;
  return psi;
}

double yanai_crossing(const CoriolisProfile& profile, double quad_tol) {
  using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
  // integrate per smooth segment so interior kinks and jumps are respected
  double num = 0.0, den = 0.0, err_total = 0.0;
  for (const auto& seg : profile.segments()) {
    double a = std::max(seg.y_from, -profile.range());
    double b = std::min(seg.y_to, profile.range());
    if (!(b > a)) continue;
    double e1 = 0, e2 = 0;
    num += gk::integrate(
        [&](double y) {
          double f = profile.evaluate(y);
          double F = profile.antiderivative(y);
          return f * f * std::exp(-2.0 * F);
        },
        a, b, 12, quad_tol, &e1);
    den += gk::integrate(
        [&](double y) { return std::exp(-2.0 * profile.antiderivative(y)); }, a, b,
        12, quad_tol, &e2);
    err_total += e1 + e2;
  }
  if (!(den > 0.0) || err_total > 1e3 * quad_tol * std::max(1.0, num + den)) {
    std::ostringstream os;
    os << "yanai_crossing: quadrature did not converge (error estimate "
       << err_total << ")";
    throw std::runtime_error(os.str());
  }
  return -std::sqrt(num / den);
}

std::array<double, 3> bulk_bands(double f, double xi, double zeta) {
  double r = std::sqrt(xi * xi + zeta * zeta + f * f);
  return {-r, 0.0, r};
}

std::pair<int, int> predicted_flow(const CoriolisProfile& profile, double alpha) {
  if (!(alpha > 0))
    throw std::domain_error("predicted_flow: alpha must be positive");
  profile.require_confining();
  auto [jl, jr] = profile.count_JL_JR(alpha);
  return {2, 2 - jl + jr};
}

SturmResidual sturm_residual(const CoriolisProfile& profile, const Grid& grid,
                             double xi, const EigenPair& pair, double w_seam) {
  const double E = pair.E;
  const double tol_exi = 1e-6;
  if (std::abs(E) < tol_exi || std::abs(std::abs(E) - std::abs(xi)) < tol_exi)
    throw std::domain_error(
        "sturm_residual: elimination of (eta,u) requires |E| away from 0 and |xi|");
  const double mu = xi / E;
  const int m = grid.m;
  const double h = grid.h;

  std::vector<double> vre_abs(m);
  std::vector<cplx> v(m), eta(m), u(m);
  for (int i = 0; i < m; ++i) {
    eta[i] = pair.psi[3 * i];
    u[i] = pair.psi[3 * i + 1];
    v[i] = pair.psi[3 * i + 2];
    vre_abs[i] = std::abs(v[i]);
  }

  // nodes adjacent to a jump get one-sided stencils; nodes inside the seam
  // buffer are excluded (the operator there uses the periodized profile)
  std::vector<int> jump_left(profile.jumps().size(), -1);
  for (std::size_t j = 0; j < profile.jumps().size(); ++j) {
    double yj = profile.jumps()[j].y;
    int il = int(std::floor((yj + grid.L) / h));
    if (grid.node(il) > yj) --il;
    jump_left[j] = il;
  }
  auto near_jump = [&](int i) {
    for (int il : jump_left)
      if (i >= il - 1 && i <= il + 2) return true;
    return false;
  };

  const double interior = grid.L - w_seam - 2 * h;
  double r2 = 0.0, v2 = 0.0, d2v2 = 0.0;
  int used = 0;
  double lam = E * E - xi * xi;
  for (int i = 2; i < m - 2; ++i) {
    double y = grid.node(i);
    if (std::abs(y) > interior) continue;
    double f = profile.evaluate(y);
    double fp = profile.derivative(y);
    cplx d2;
    bool onesided = false;
    for (int il : jump_left) {
      if (i == il) { // one-sided from the left
        d2 = (v[i] - 2.0 * v[i - 1] + v[i - 2]) / (h * h);
        onesided = true;
      } else if (i == il + 1) { // one-sided from the right
        d2 = (v[i] - 2.0 * v[i + 1] + v[i + 2]) / (h * h);
        onesided = true;
      }
    }
    if (near_jump(i) && !onesided) continue;
    if (!onesided) d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
    cplx r = -d2 + (f * f + mu * fp) * v[i] - lam * v[i];
    r2 += std::norm(r);
    v2 += std::norm(v[i]);
    d2v2 += std::norm(d2);
    ++used;
  }

  SturmResidual out;
  out.nodes_used = used;
  if (v2 > 0 && used > 0) {
    double curvature = std::sqrt(d2v2 / v2); // ~ k_eff^2 of the mode
    double scale = (1.0 + curvature) * (1.0 + curvature);
    out.ode_residual = std::sqrt(r2 / v2) / scale;
  }

  // jump relations and (eta,u) reconstruction
  for (std::size_t j = 0; j < profile.jumps().size(); ++j) {
    const auto& jmp = profile.jumps()[j];
    int il = jump_left[j];
    if (il < 1 || il + 2 >= m) continue;
    cplx dvp = (v[il + 2] - v[il + 1]) / h; // v'(y_j^+)
    cplx dvm = (v[il] - v[il - 1]) / h;     // v'(y_j^-)
    cplx vj = 0.5 * (v[il] + v[il + 1]);
    double df = jmp.f_plus - jmp.f_minus;
    cplx rel = -(dvp - dvm) + mu * df * vj;
    double kloc = (std::abs(dvp) + std::abs(dvm)) / (2.0 * std::abs(vj) + 1e-300);
    double scale = std::abs(vj) * (1.0 + kloc) * (1.0 + kloc);
    out.jump_residuals.push_back(std::abs(rel) / std::max(scale, 1e-300));
  }

  // (eta, u) from v via the exact discrete elimination
  double mis2 = 0.0, ref2 = 0.0;
  const double denom = E * E - xi * xi;
  for (int i = 1; i < m - 1; ++i) {
    double y = grid.node(i);
    if (std::abs(y) > interior || near_jump(i)) continue;
    double f = profile.evaluate(y);
    cplx Dv = (v[i + 1] - v[i - 1]) / (2.0 * h) / cplx(0.0, 1.0);
    cplx eta_hat = (E * Dv + cplx(0.0, xi * f) * v[i]) / denom;
    cplx u_hat = (xi * Dv + cplx(0.0, E * f) * v[i]) / denom;
    mis2 += std::norm(eta_hat - eta[i]) + std::norm(u_hat - u[i]);
    ref2 += std::norm(eta[i]) + std::norm(u[i]);
  }
  out.etau_mismatch = (ref2 > 0) ? std::sqrt(mis2 / ref2) : 0.0;
  return out;
}

} // namespace eqf
