#include "equatorflow/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "equatorflow/oracles.hpp"

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace eqf {

namespace {

struct FiberWork {
  FiberSummary summary;
  TrackFiber track_data;
  bool ready = false;
  std::string error;
};

double v_component_fraction(const std::vector<cplx>& psi, int m) {
  double v2 = 0.0;
  for (int i = 0; i < m; ++i) v2 += std::norm(psi[3 * i + 2]);
  return v2;
}

void solve_one_fiber(const SweepConfig& cfg, const Grid& grid, int k, FiberWork& out) {
  const double xi = cfg.xi_at(k);
  AssembleOptions aopts;
  aopts.w_seam = cfg.w_seam;
  FiberedOperator op = assemble(cfg.profile, grid, xi, aopts);

  std::vector<EigenPair> pairs;
  if (cfg.full_solve) {
    pairs = eig_full(op, cfg.eig);
  } else {
    const double floor_e = cfg.track.eps_ess * cfg.e_floor_factor;
    const double cap = cfg.track.e_cap;
    pairs = eig_windows(op, {{-cap, -floor_e}, {floor_e, cap}}, cfg.eig);
  }

  disentangle_degenerate(pairs, grid, cfg.filter);

  out.summary.xi = xi;
  out.summary.n_pairs = int(pairs.size());
  out.track_data.xi = xi;
  out.track_data.dim = grid.dim();

  for (const auto& p : pairs) {
    PairRecord row;
    row.E = p.E;
    row.residual = p.residual;
    row.v_fraction = v_component_fraction(p.psi, grid.m);
    auto [wall_ok, interior] = wall_filter(p, grid, cfg.filter);
    auto [fourier_ok, lowfreq] = fourier_filter(p, grid, cfg.filter);
    row.diag.interior_fraction = interior;
    row.diag.lowfreq_fraction = lowfreq;
    row.diag.kept = wall_ok && fourier_ok;
    row.diag.reject_reason =
        row.diag.kept ? RejectReason::none
                      : (!wall_ok ? RejectReason::wall : RejectReason::fourier);
    if (row.diag.kept) {
      out.track_data.evals.push_back(p.E);
      out.track_data.vectors.insert(out.track_data.vectors.end(), p.psi.begin(),
                                    p.psi.end());
      ++out.summary.n_kept;
    }
    out.summary.rows.push_back(row);
  }
}

} // namespace

std::string SweepResult::fibers_csv() const {
  std::ostringstream os;
  os << "xi,index,E,residual,v_fraction,interior_fraction,lowfreq_fraction,kept,"
        "reject_reason\n";
  os.precision(17);
  for (const auto& f : fibers) {
    int idx = 0;
    for (const auto& r : f.rows) {
      const char* reason = r.diag.reject_reason == RejectReason::none
                               ? "none"
                               : (r.diag.reject_reason == RejectReason::wall
                                      ? "wall"
                                      : "fourier");
      os << f.xi << ',' << idx++ << ',' << r.E << ',' << r.residual << ','
         << r.v_fraction << ',' << r.diag.interior_fraction << ','
         << r.diag.lowfreq_fraction << ',' << (r.diag.kept ? 1 : 0) << ',' << reason
         << '\n';
    }
  }
  return os.str();
}

std::string SweepResult::branches_csv() const {
  std::ostringstream os;
  os << "branch_id,xi,E\n";
  os.precision(17);
  for (const auto& b : branches)
    for (const auto& p : b.points)
      os << b.id << ',' << p.xi << ',' << p.E << '\n';
  return os.str();
}

std::string SweepResult::flow_report_text() const {
  std::ostringstream os;
  os.precision(12);
  os << "equatorflow flow report\n";
  os << "version: " << provenance.version << "\n";
  os << "config_hash: " << std::hex << provenance.config_hash << std::dec << "\n";
  os << "branches: " << branches.size() << "\n\n";
  for (const auto& fl : flows) {
    os << "alpha: " << fl.alpha << "\n";
    os << "  sf_measured: " << fl.sf_measured << "\n";
    os << "  sf_bec: " << fl.sf_bec << "\n";
    os << "  sf_thm: " << fl.sf_thm << "\n";
    os << "  reliable: " << (fl.reliable ? "yes" : "no") << "\n";
    os << "  bec_satisfied: " << (fl.sf_measured == fl.sf_bec ? "yes" : "no") << "\n";
    os << "  thm_satisfied: " << (fl.sf_measured == fl.sf_thm ? "yes" : "no") << "\n";
    for (const auto& c : fl.crossings)
      os << "  crossing: branch=" << c.branch_id << " xi=" << c.xi_cross
         << " direction=" << (c.direction > 0 ? "+1" : "-1") << "\n";
    for (const auto& w : fl.warnings) os << "  warning: " << w << "\n";
    os << "\n";
  }
  return os.str();
}

std::string SweepResult::spectrum_svg() const {
  // scatter of kept (xi, E); rejected pairs in a faint second layer
  double xi_lo = 0, xi_hi = 0;
  if (!fibers.empty()) {
    xi_lo = fibers.front().xi;
    xi_hi = fibers.back().xi;
  }
  const double e_lo = -9, e_hi = 9, W = 900, H = 600;
  auto X = [&](double xi) { return (xi - xi_lo) / (xi_hi - xi_lo + 1e-300) * (W - 80) + 40; };
  auto Y = [&](double E) { return H - 40 - (E - e_lo) / (e_hi - e_lo) * (H - 80); };
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
     << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  os << "<g fill='#bbbbbb'>\n";
  for (const auto& f : fibers)
    for (const auto& r : f.rows)
      if (!r.diag.kept && r.E != 0.0 && std::abs(r.E) < e_hi)
        os << "<circle cx='" << X(f.xi) << "' cy='" << Y(r.E) << "' r='0.8'/>\n";
  os << "</g>\n<g fill='#003366'>\n";
  for (const auto& f : fibers)
    for (const auto& r : f.rows)
      if (r.diag.kept && std::abs(r.E) < e_hi)
        os << "<circle cx='" << X(f.xi) << "' cy='" << Y(r.E) << "' r='1.4'/>\n";
  os << "</g>\n</svg>\n";
  return os.str();
}

uint64_t SweepResult::result_hash() const {
  return fnv1a64(fibers_csv() + branches_csv() + flow_report_text());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  if (!cfg.alphas.empty()) cfg.profile.require_confining();
  const Grid grid = Grid::make(cfg.L, cfg.m);
  const int nf = cfg.n_fibers();
  const auto t0 = std::chrono::steady_clock::now();

  int workers = cfg.workers > 0 ? cfg.workers
                                : int(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, nf);
  // one BLAS thread per worker keeps runs deterministic and avoids
  // oversubscription
  if (workers > 1) {
    setenv("OPENBLAS_NUM_THREADS", "1", 0);
    if (openblas_set_num_threads) openblas_set_num_threads(1);
  }

  std::vector<FiberWork> slots(nf);
  std::mutex mu;
  std::condition_variable cv;
  int next_fiber = 0;
  bool abort = false;

  auto worker_fn = [&]() {
    for (;;) {
      int k;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (abort || next_fiber >= nf) return;
        k = next_fiber++;
      }
      FiberWork w;
      try {
        solve_one_fiber(cfg, grid, k, w);
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "fiber " << k << " (xi=" << cfg.xi_at(k) << "): " << e.what();
        w.error = os.str();
      }
      {
        std::lock_guard<std::mutex> lock(mu);
        slots[k] = std::move(w);
        slots[k].ready = true;
        if (!slots[k].error.empty()) abort = true;
      }
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker_fn);

  SweepResult result;
  result.fibers.resize(nf);

  std::filesystem::path ckpt_dir;
  if (cfg.checkpoint && !cfg.out_dir.empty()) {
    ckpt_dir = std::filesystem::path(cfg.out_dir) / "checkpoint";
    std::filesystem::create_directories(ckpt_dir);
    std::ostringstream manifest;
    manifest << "config_hash: " << std::hex << cfg.config_hash() << std::dec
             << "\nfibers: " << nf << "\n";
    write_text_file((ckpt_dir / "manifest.txt").string(), manifest.str());
  }

  // consume in xi order and feed the tracker through a producer
  auto producer = [&](int k) -> TrackFiber {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return slots[k].ready || abort; });
    if (!slots[k].ready || !slots[k].error.empty()) {
      std::string msg = slots[k].error;
      if (msg.empty())
        for (const auto& s : slots)
          if (!s.error.empty()) msg = s.error;
      if (msg.empty()) msg = "sweep aborted";
      throw solver_error(msg);
    }
    result.fibers[k] = std::move(slots[k].summary);
    TrackFiber data = std::move(slots[k].track_data);
    lock.unlock();
    if (!ckpt_dir.empty()) {
      std::ostringstream os, name;
      os.precision(17);
      for (std::size_t q = 0; q < result.fibers[k].rows.size(); ++q) {
        const auto& r = result.fibers[k].rows[q];
        os << result.fibers[k].xi << ',' << q << ',' << r.E << ','
           << (r.diag.kept ? 1 : 0) << '\n';
      }
      name << "fiber_" << k << ".csv";
      write_text_file((ckpt_dir / name.str()).string(), os.str());
    }
    return data;
  };

  std::vector<Branch> branches;
  try {
    branches = track(nf, producer, cfg.track);
  } catch (...) {
    {
      std::lock_guard<std::mutex> lock(mu);
      abort = true;
    }
    cv.notify_all();
    for (auto& t : pool) t.join();
    throw;
  }
  for (auto& t : pool) t.join();

  stitch(branches, cfg.track);
  classify_limits(branches, cfg.xi_min, cfg.xi_max, cfg.track);
  result.branches = std::move(branches);

  for (double a : cfg.alphas)
    result.flows.push_back(spectral_flow(result.branches, a, cfg.profile, cfg.track));

  result.provenance.config_hash = cfg.config_hash();
  result.provenance.version = version_string;
  result.provenance.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path dir(cfg.out_dir);
    write_text_file((dir / "fibers.csv").string(), result.fibers_csv());
    write_text_file((dir / "branches.csv").string(), result.branches_csv());
    write_text_file((dir / "flow_report.txt").string(), result.flow_report_text());
    if (cfg.write_svg)
      write_text_file((dir / "spectrum.svg").string(), result.spectrum_svg());
  }
  return result;
}

SelfTestReport self_test(const SweepConfig& cfg, double gamma_break_epsilon) {
  SelfTestReport rep;
  const Grid grid = Grid::make(cfg.L, cfg.m);
  AssembleOptions aopts;
  aopts.w_seam = cfg.w_seam;
  aopts.gamma_break_epsilon = gamma_break_epsilon;

  auto note = [&](const std::string& s) { rep.lines.push_back(s); };

  // gamma symmetry: multiset at -xi vs negated multiset at xi
  const int n_samples = 10;
  for (int s = 0; s < n_samples; ++s) {
    double xi = cfg.xi_min + (cfg.xi_max - cfg.xi_min) * (s + 0.5) / n_samples;
    auto wp = eigenvalues_only(assemble(cfg.profile, grid, xi, aopts));
    auto wm = eigenvalues_only(assemble(cfg.profile, grid, -xi, aopts));
    std::sort(wp.begin(), wp.end());
    std::sort(wm.begin(), wm.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < wp.size(); ++i)
      worst = std::max(worst, std::abs(wp[i] + wm[wm.size() - 1 - i]));
    rep.max_gamma_asymmetry = std::max(rep.max_gamma_asymmetry, worst);

    double trace = 0.0;
    for (double w : wp) trace += w;
    rep.max_trace_error = std::max(rep.max_trace_error, std::abs(trace));
  }
  {
    std::ostringstream os;
    os << "gamma symmetry: max |E_k(xi) + E_{-k}(-xi)| = " << rep.max_gamma_asymmetry;
    note(os.str());
  }
  if (rep.max_gamma_asymmetry > 1e-10) rep.pass = false;
  {
    std::ostringstream os;
    os << "trace identity: max |sum E| = " << rep.max_trace_error << " (limit "
       << 1e-8 * grid.dim() << ")";
    note(os.str());
  }
  if (rep.max_trace_error > 1e-8 * grid.dim()) rep.pass = false;

  // window/full consistency on three deterministic fibers
  const double floor_e = cfg.track.eps_ess * cfg.e_floor_factor;
  const double cap = cfg.track.e_cap;
  for (int s = 0; s < 3; ++s) {
    uint64_t h = fnv1a64("selftest-fiber" + std::to_string(s) +
                         std::to_string(cfg.config_hash()));
    int k = int(h % uint64_t(cfg.n_fibers()));
    double xi = cfg.xi_at(k);
    FiberedOperator op = assemble(cfg.profile, grid, xi, aopts);
    EigOptions banded = cfg.eig;
    banded.solver = SolverKind::banded;
    auto win = eig_windows(op, {{floor_e, cap}}, banded);
    std::vector<double> full;
    if (grid.m <= 801) {
      EigOptions dense = cfg.eig;
      dense.solver = SolverKind::dense;
      for (const auto& p : eig_full(op, dense))
        if (p.E >= floor_e && p.E <= cap) full.push_back(p.E);
    } else {
      full = detail::band_eigenvalues(op, floor_e, cap, false);
    }
    bool ok = full.size() == win.size();
    double dmax = 0.0;
    if (ok)
      for (std::size_t i = 0; i < full.size(); ++i)
        dmax = std::max(dmax, std::abs(full[i] - win[i].E));
    ok = ok && dmax <= 1e-8;
    std::ostringstream os;
    os << "window/full consistency at xi=" << xi << ": " << win.size() << "/"
       << full.size() << " eigenvalues, max diff " << dmax << (ok ? " ok" : " MISMATCH");
    note(os.str());
    if (!ok) {
      rep.window_consistency = false;
      rep.pass = false;
    }
  }

  // constant profile: plane-wave closed form (exact in exact arithmetic)
  if (cfg.profile.jumps().empty() &&
      cfg.profile.max_abs_slope(-grid.L, grid.L) == 0.0) {
    double f0 = cfg.profile.evaluate(0.0);
    double xi = cfg.xi_at(cfg.n_fibers() / 3);
    auto w = eigenvalues_only(assemble(cfg.profile, grid, xi, aopts));
    std::vector<double> expect;
    expect.reserve(w.size());
    for (int k = 0; k < grid.m; ++k) {
      int kk = (k <= (grid.m - 1) / 2) ? k : k - grid.m;
      double s = std::sin(2.0 * M_PI * kk / grid.m) / grid.h;
      double r = std::sqrt(s * s + xi * xi + f0 * f0);
      expect.push_back(0.0);
      expect.push_back(r);
      expect.push_back(-r);
    }
    std::sort(w.begin(), w.end());
    std::sort(expect.begin(), expect.end());
    double dmax = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      dmax = std::max(dmax, std::abs(w[i] - expect[i]) / (1.0 + std::abs(expect[i])));
    std::ostringstream os;
    os << "constant-profile closed form at xi=" << xi << ": max rel diff " << dmax;
    note(os.str());
    if (dmax > 1e-9) {
      rep.constant_closed_form = false;
      rep.pass = false;
    }
  }
  return rep;
}

} // namespace eqf
