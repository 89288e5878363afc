#include "equatorflow/branches.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

namespace eqf {

namespace {

struct ActiveBranch {
  std::vector<BranchPoint> points;
  std::vector<cplx> last_vec;
  double slope = 0.0;
};

double overlap(const std::vector<cplx>& a, const TrackFiber& fiber, int col) {
  const int n = fiber.dim;
  cplx acc(0);
  const cplx* b = fiber.vectors.data() + std::size_t(col) * n;
  for (int i = 0; i < n; ++i) acc += std::conj(a[i]) * b[i];
  return std::abs(acc);
}

} // namespace

const char* limit_kind_name(LimitKind k) {
  switch (k) {
  case LimitKind::diverges_plus: return "diverges_plus";
  case LimitKind::diverges_minus: return "diverges_minus";
  case LimitKind::tends_to: return "tends_to";
  case LimitKind::reaches_zero: return "reaches_zero";
  case LimitKind::cap_exit: return "cap_exit";
  case LimitKind::interior_break: return "interior_break";
  case LimitKind::undecided: return "undecided";
  }
  return "?";
}

std::vector<Branch> track(int n_fibers, const FiberProducer& producer,
                          const TrackParams& params) {
  std::vector<Branch> done;
  std::vector<ActiveBranch> active;

  for (int k = 0; k < n_fibers; ++k) {
    TrackFiber fiber = producer(k);
    const int nc = int(fiber.evals.size());
    std::vector<bool> used(nc, false);

    struct Cand {
      double ov;
      int branch, col;
    };
    std::vector<Cand> cands;
    for (int bi = 0; bi < int(active.size()); ++bi) {
      const auto& b = active[bi];
      double pred = b.points.back().E + b.slope * params.delta_xi;
      std::vector<Cand> qualified;
      for (int c = 0; c < nc; ++c) {
        if (std::abs(fiber.evals[c] - pred) >= params.match_tol) continue;
        double ov = overlap(b.last_vec, fiber, c);
        if (ov >= params.overlap_min) qualified.push_back({ov, bi, c});
      }
      if (qualified.size() >= 2) {
        std::sort(qualified.begin(), qualified.end(),
                  [](const Cand& a, const Cand& b_) { return a.ov > b_.ov; });
        double gap = std::abs(fiber.evals[qualified[0].col] -
                              fiber.evals[qualified[1].col]);
        if (gap > params.degenerate_gap *
                      (1.0 + std::abs(fiber.evals[qualified[0].col]))) {
          std::ostringstream os;
          os << "ambiguous continuation at fiber " << k << " (xi=" << fiber.xi
             << "): branch at E=" << b.points.back().E << " matches E="
             << fiber.evals[qualified[0].col] << " (overlap " << qualified[0].ov
             << ") and E=" << fiber.evals[qualified[1].col] << " (overlap "
             << qualified[1].ov << ")";
          throw tracking_error(os.str());
        }
      }
      for (const auto& q : qualified) cands.push_back(q);
    }

    std::stable_sort(cands.begin(), cands.end(),
                     [](const Cand& a, const Cand& b) { return a.ov > b.ov; });
    std::vector<bool> taken(active.size(), false);
    std::vector<ActiveBranch> next;
    for (const auto& q : cands) {
      if (taken[q.branch] || used[q.col]) continue;
      taken[q.branch] = true;
      used[q.col] = true;
      ActiveBranch b = std::move(active[q.branch]);
      double Eold = b.points.back().E;
      b.slope = (fiber.evals[q.col] - Eold) / params.delta_xi;
      b.points.push_back({fiber.xi, fiber.evals[q.col], k, q.col});
      b.last_vec.assign(fiber.vectors.begin() + std::size_t(q.col) * fiber.dim,
                        fiber.vectors.begin() + std::size_t(q.col + 1) * fiber.dim);
      next.push_back(std::move(b));
    }
    for (int bi = 0; bi < int(active.size()); ++bi) {
      if (taken[bi]) continue;
      Branch b;
      b.points = std::move(active[bi].points);
      done.push_back(std::move(b));
    }
    for (int c = 0; c < nc; ++c) {
      if (used[c]) continue;
      ActiveBranch nb;
      nb.points.push_back({fiber.xi, fiber.evals[c], k, c});
      nb.last_vec.assign(fiber.vectors.begin() + std::size_t(c) * fiber.dim,
                         fiber.vectors.begin() + std::size_t(c + 1) * fiber.dim);
      next.push_back(std::move(nb));
    }
    active = std::move(next);
  }
  for (auto& b : active) {
    Branch br;
    br.points = std::move(b.points);
    done.push_back(std::move(br));
  }
  for (int i = 0; i < int(done.size()); ++i) done[i].id = i;
  return done;
}

void stitch(std::vector<Branch>& branches, const TrackParams& params) {
  auto end_slope = [&](const Branch& b) {
    const auto& p = b.points;
    return p.size() > 1 ? (p.back().E - p[p.size() - 2].E) / params.delta_xi : 0.0;
  };
  std::vector<bool> dead(branches.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<int, std::vector<int>> starts;
    for (int j = 0; j < int(branches.size()); ++j)
      if (!dead[j]) starts[branches[j].points.front().fiber].push_back(j);

    for (int i = 0; i < int(branches.size()); ++i) {
      if (dead[i]) continue;
      Branch& b = branches[i];
      int ke = b.points.back().fiber;
      double sl = end_slope(b);
      int hit = -1;
      for (int g = 1; g <= params.stitch_max_gap && hit < 0; ++g) {
        auto it = starts.find(ke + g);
        if (it == starts.end()) continue;
        double pred = b.points.back().E + sl * g * params.delta_xi;
        std::vector<int> local;
        for (int j : it->second) {
          if (dead[j] || j == i) continue;
          if (std::abs(branches[j].points.front().E - pred) < params.match_tol * g)
            local.push_back(j);
        }
        if (local.size() > 1) break; // ambiguous: leave split
        if (local.size() == 1) {
          int j = local[0];
          // no other branch end may also predict onto j
          int rivals = 0;
          for (int i2 = 0; i2 < int(branches.size()); ++i2) {
            if (dead[i2] || i2 == i) continue;
            int g2 = branches[j].points.front().fiber - branches[i2].points.back().fiber;
            if (g2 < 1 || g2 > params.stitch_max_gap) continue;
            double pred2 =
                branches[i2].points.back().E + end_slope(branches[i2]) * g2 * params.delta_xi;
            if (std::abs(branches[j].points.front().E - pred2) < params.match_tol * g2)
              ++rivals;
          }
          if (rivals == 0) hit = j;
          break;
        }
      }
      if (hit >= 0) {
        auto& pts = branches[hit].points;
        b.points.insert(b.points.end(), pts.begin(), pts.end());
        dead[hit] = true;
        changed = true;
      }
    }
  }
  std::vector<Branch> keep;
  for (int i = 0; i < int(branches.size()); ++i)
    if (!dead[i]) keep.push_back(std::move(branches[i]));
  branches = std::move(keep);
  for (int i = 0; i < int(branches.size()); ++i) branches[i].id = i;
}

namespace {

LimitClass classify_one(const Branch& b, bool right, double xi_lo, double xi_hi,
                        const TrackParams& p) {
  const auto& pts = b.points;
  const int n = int(pts.size());
  LimitClass out;
  const BranchPoint& end = right ? pts.back() : pts.front();
  out.value = end.E;
  out.xi = end.xi;
  const bool at_edge = right ? (end.xi >= xi_hi - 1e-9) : (end.xi <= xi_lo + 1e-9);

  if (!at_edge) {
    double last_step = 0.0;
    if (n > 1)
      last_step = right ? std::abs(pts[n - 1].E - pts[n - 2].E)
                        : std::abs(pts[1].E - pts[0].E);
    if (std::abs(end.E) <= p.eps_ess + std::max(1.6 * last_step, 0.06)) {
      out.kind = LimitKind::reaches_zero;
      return out;
    }
    if (std::abs(end.E) >= p.e_cap - 0.35) {
      out.kind = LimitKind::cap_exit;
      return out;
    }
    out.kind = LimitKind::interior_break;
    return out;
  }

  if (n < p.slope_window + 1) { // too short to classify slopes; use the value
    out.kind = LimitKind::interior_break;
    return out;
  }
  // outward slope: dE/dxi at the right end, -dE/dxi at the left end
  bool all_div = true, all_flat = true, all_divm = true;
  for (int q = 0; q < p.slope_window; ++q) {
    double dE = right ? (pts[n - 1 - q].E - pts[n - 2 - q].E)
                      : (pts[q].E - pts[q + 1].E);
    double dxi_signed = right ? p.delta_xi : -p.delta_xi;
    double slope = dE / dxi_signed;       // dE/dxi
    double outward = right ? slope : -slope;
    if (!(outward > p.slope_div_min)) all_div = false;
    if (!(outward < -p.slope_div_min)) all_divm = false;
    if (!(std::abs(slope) < p.slope_flat_max)) all_flat = false;
  }
  if (all_div && end.E > p.e_div_min)
    out.kind = LimitKind::diverges_plus;
  else if (all_divm && end.E < -p.e_div_min)
    out.kind = LimitKind::diverges_minus;
  else if (all_flat)
    out.kind = LimitKind::tends_to;
  else
    out.kind = LimitKind::undecided;
  return out;
}

// sign of (limit - alpha) per the SF conventions; nullopt when undecided
std::optional<double> limit_sign(const LimitClass& c, double alpha) {
  switch (c.kind) {
  case LimitKind::diverges_plus: return 1.0;
  case LimitKind::diverges_minus: return -1.0;
  case LimitKind::cap_exit: return c.value > 0 ? 1.0 : -1.0;
  case LimitKind::reaches_zero: return alpha > 0 ? -1.0 : 1.0;
  case LimitKind::tends_to:
  case LimitKind::interior_break:
    return c.value > alpha ? 1.0 : -1.0;
  case LimitKind::undecided: return std::nullopt;
  }
  return std::nullopt;
}

} // namespace

void classify_limits(std::vector<Branch>& branches, double xi_lo, double xi_hi,
                     const TrackParams& params) {
  for (auto& b : branches) {
    b.left = classify_one(b, false, xi_lo, xi_hi, params);
    b.right = classify_one(b, true, xi_lo, xi_hi, params);
  }
}

FlowReport spectral_flow(const std::vector<Branch>& branches, double alpha,
                         const CoriolisProfile& profile, const TrackParams& params) {
  FlowReport rep;
  rep.alpha = alpha;
  if (!(alpha > params.eps_ess))
    throw std::invalid_argument("spectral_flow: alpha must exceed the E=0 band");
  auto [jl, jr] = profile.count_JL_JR(alpha);
  rep.sf_bec = 2;
  rep.sf_thm = 2 - jl + jr;

  double total = 0.0;
  for (const auto& b : branches) {
    auto sl = limit_sign(b.left, alpha);
    auto sr = limit_sign(b.right, alpha);
    for (const auto* c : {&b.left, &b.right}) {
      if ((c->kind == LimitKind::tends_to || c->kind == LimitKind::interior_break) &&
          std::abs(c->value - alpha) < params.level_margin) {
        std::ostringstream os;
        os << "branch " << b.id << " endpoint E=" << c->value
           << " within level_margin of alpha=" << alpha;
        rep.warnings.push_back(os.str());
        rep.reliable = false;
      }
    }
    if (!sl || !sr) {
      double emin = b.points.front().E, emax = emin;
      for (const auto& q : b.points) {
        emin = std::min(emin, q.E);
        emax = std::max(emax, q.E);
      }
      if (emin - 0.25 < alpha && alpha < emax + 0.25) {
        std::ostringstream os;
        os << "branch " << b.id << " near alpha=" << alpha
           << " has an undecided limit (" << limit_kind_name(b.left.kind) << "/"
           << limit_kind_name(b.right.kind) << ")";
        rep.warnings.push_back(os.str());
        rep.reliable = false;
      }
      continue;
    }
    total += 0.5 * (*sr - *sl);

    // interior crossings, for the report
    for (std::size_t q = 1; q < b.points.size(); ++q) {
      double a = b.points[q - 1].E - alpha, c = b.points[q].E - alpha;
      if (a == 0.0 || c == 0.0 || a * c > 0) continue;
      double t = a / (a - c);
      rep.crossings.push_back(
          {b.id, b.points[q - 1].xi + t * (b.points[q].xi - b.points[q - 1].xi),
           c > a ? 1 : -1});
    }
  }
  double rounded = std::round(total);
  if (std::abs(total - rounded) > 1e-9) {
    std::ostringstream os;
    os << "non-integer spectral flow " << total;
    rep.warnings.push_back(os.str());
    rep.reliable = false;
  }
  rep.sf_measured = int(rounded);
  return rep;
}

} // namespace eqf
