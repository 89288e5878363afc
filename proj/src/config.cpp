#include "equatorflow/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace eqf {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail_at(const std::string& path, const std::string& what) {
  throw config_error("config field '" + path + "': " + what);
}

int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

json parse_or_cite(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "config parse error at line " << line_of_offset(text, e.byte) << ": "
       << e.what();
    throw config_error(os.str());
  }
}

double need_num(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail_at(path + "." + key, "missing");
  if (!j[key].is_number()) fail_at(path + "." + key, "must be a number");
  return j[key].get<double>();
}

double opt_num(const json& j, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  return j[key].get<double>();
}

Segment parse_segment(const json& j, const std::string& path) {
  if (!j.contains("kind")) fail_at(path + ".kind", "missing");
  std::string kind = j["kind"].get<std::string>();
  double y0 = need_num(j, path, "y_from");
  double y1 = need_num(j, path, "y_to");
  if (kind == "constant")
    return Segment::constant(y0, y1, need_num(j, path, "value"));
  if (kind == "linear")
    return Segment::linear(y0, y1, need_num(j, path, "a"), opt_num(j, "b", 0.0));
  if (kind == "tanh")
    return Segment::tanh_ramp(y0, y1, need_num(j, path, "center"),
                              need_num(j, path, "width"),
                              need_num(j, path, "amplitude"),
                              opt_num(j, "offset", 0.0));
  if (kind == "ramp")
    return Segment::smooth_ramp(y0, y1, need_num(j, path, "from"),
                                need_num(j, path, "to"));
  if (kind == "table") {
    if (!j.contains("ys") || !j.contains("values"))
      fail_at(path, "table segment needs 'ys' and 'values' arrays");
    return Segment::table(y0, y1, j["ys"].get<std::vector<double>>(),
                          j["values"].get<std::vector<double>>());
  }
  fail_at(path + ".kind", "unknown kind '" + kind +
                              "' (constant|linear|tanh|ramp|table)");
}

CoriolisProfile parse_profile(const json& j, const std::string& path) {
  if (!j.contains("segments") || !j["segments"].is_array() || j["segments"].empty())
    fail_at(path + ".segments", "non-empty array required");
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < j["segments"].size(); ++i) {
    std::ostringstream os;
    os << path << ".segments[" << i << "]";
    try {
      segs.push_back(parse_segment(j["segments"][i], os.str()));
    } catch (const std::invalid_argument& e) {
      fail_at(os.str(), e.what());
    }
  }
  ProfileOptions opts;
  opts.plateau_halfwidth = opt_num(j, "plateau_halfwidth", 0.5);
  opts.tail_slope = opt_num(j, "tail_slope", 1.0);
  opts.range = opt_num(j, "range", 16.0);
  if (j.contains("tails")) opts.add_tails = j["tails"].get<bool>();
  try {
    return CoriolisProfile::from_segments(std::move(segs), opts);
  } catch (const std::invalid_argument& e) {
    fail_at(path, e.what());
  }
}

} // namespace

CoriolisProfile parse_profile_json(const std::string& text) {
  json j = parse_or_cite(text);
  return parse_profile(j.contains("profile") ? j["profile"] : j, "profile");
}

int SweepConfig::n_fibers() const {
  return int(std::lround((xi_max - xi_min) / delta_xi)) + 1;
}

void SweepConfig::validate() const {
  if (m < 3 || m % 2 == 0) fail_at("grid.m", "must be odd and >= 3");
  if (!(L > 0)) fail_at("grid.L", "must be positive");
  if (!(delta_xi > 0)) fail_at("sweep.delta_xi", "must be positive");
  if (!(xi_min < xi_max)) fail_at("sweep.xi_min", "must be below xi_max");
  if (profile.range() < L) fail_at("profile.range", "must cover [-L, L]");
  // symmetric grid about 0 enables the gamma self-test
  double mid = xi_min + xi_max;
  if (std::abs(mid) > 1e-9) fail_at("sweep.xi_min", "grid must be symmetric about 0");
  double steps = (xi_max - xi_min) / delta_xi;
  if (std::abs(steps - std::lround(steps)) > 1e-9)
    fail_at("sweep.delta_xi", "must divide the xi range");
  auto [el, er] = profile.half_jump_sets();
  for (double a : alphas) {
    if (!(a > track.eps_ess))
      fail_at("sweep.alphas", "levels must exceed eps_ess");
    for (double v : el)
      if (std::abs(v - a) < track.level_margin)
        fail_at("sweep.alphas", "level too close to a half-jump value");
    for (double v : er)
      if (std::abs(v - a) < track.level_margin)
        fail_at("sweep.alphas", "level too close to a half-jump value");
  }
}

std::string SweepConfig::canonical_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "L=" << L << ";m=" << m << ";w_seam=" << w_seam << ";xi=[" << xi_min << ','
     << xi_max << ',' << delta_xi << "];full=" << full_solve
     << ";tol=" << eig.tol << ";solver=" << int(eig.solver)
     << ";filter=[" << filter.interior_window << ',' << filter.wall_keep_threshold
     << ',' << filter.band_fraction << ',' << filter.fourier_reject_threshold << ','
     << filter.cluster_tol << "];track=[" << track.overlap_min << ','
     << track.match_tol << ',' << track.eps_ess << ',' << track.e_cap << ','
     << track.slope_window << ',' << track.slope_div_min << ','
     << track.slope_flat_max << ',' << track.e_div_min << ','
     << track.level_margin << ',' << track.stitch_max_gap << "];alphas=[";
  for (double a : alphas) os << a << ',';
  os << "];profile=" << profile_json;
  return os.str();
}

uint64_t fnv1a64(const std::string& text) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

uint64_t SweepConfig::config_hash() const { return fnv1a64(canonical_text()); }

void apply_preset(SweepConfig& cfg, const std::string& preset) {
  if (preset == "desk") {
    cfg.m = 601;
    cfg.L = 11.0;
    cfg.delta_xi = 0.05;
    cfg.xi_min = -8.0;
    cfg.xi_max = 8.0;
  } else if (preset == "paper") {
    cfg.m = 5001;
    cfg.L = 11.0;
    cfg.delta_xi = 0.05;
    cfg.xi_min = -8.0;
    cfg.xi_max = 8.0;
    cfg.eig.solver = SolverKind::banded;
  } else {
    throw config_error("unknown preset '" + preset + "' (desk|paper)");
  }
}

SweepConfig parse_sweep_config(const std::string& text) {
  json j = parse_or_cite(text);
  SweepConfig cfg;
  if (!j.contains("profile")) fail_at("profile", "missing");
  cfg.profile = parse_profile(j["profile"], "profile");
  cfg.profile_json = j["profile"].dump();

  if (j.contains("grid")) {
    const auto& g = j["grid"];
    cfg.L = opt_num(g, "L", cfg.L);
    cfg.m = int(opt_num(g, "m", cfg.m));
    cfg.w_seam = opt_num(g, "w_seam", cfg.w_seam);
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    cfg.xi_min = opt_num(s, "xi_min", cfg.xi_min);
    cfg.xi_max = opt_num(s, "xi_max", cfg.xi_max);
    cfg.delta_xi = opt_num(s, "delta_xi", cfg.delta_xi);
    if (s.contains("alphas")) cfg.alphas = s["alphas"].get<std::vector<double>>();
    cfg.workers = int(opt_num(s, "workers", 0));
    if (s.contains("full_solve")) cfg.full_solve = s["full_solve"].get<bool>();
    if (s.contains("checkpoint")) cfg.checkpoint = s["checkpoint"].get<bool>();
    if (s.contains("svg")) cfg.write_svg = s["svg"].get<bool>();
  }
  if (j.contains("eig")) {
    const auto& e = j["eig"];
    cfg.eig.tol = opt_num(e, "tol", cfg.eig.tol);
    if (e.contains("solver")) {
      std::string s = e["solver"].get<std::string>();
      if (s == "auto")
        cfg.eig.solver = SolverKind::automatic;
      else if (s == "dense")
        cfg.eig.solver = SolverKind::dense;
      else if (s == "banded")
        cfg.eig.solver = SolverKind::banded;
      else
        fail_at("eig.solver", "one of auto|dense|banded");
    }
  }
  if (j.contains("filter")) {
    const auto& f = j["filter"];
    cfg.filter.interior_window = opt_num(f, "interior_window", cfg.filter.interior_window);
    cfg.filter.wall_keep_threshold =
        opt_num(f, "wall_keep_threshold", cfg.filter.wall_keep_threshold);
    cfg.filter.band_fraction = opt_num(f, "band_fraction", cfg.filter.band_fraction);
    cfg.filter.fourier_reject_threshold =
        opt_num(f, "fourier_reject_threshold", cfg.filter.fourier_reject_threshold);
    cfg.filter.cluster_tol = opt_num(f, "cluster_tol", cfg.filter.cluster_tol);
  }
  if (j.contains("track")) {
    const auto& t = j["track"];
    cfg.track.overlap_min = opt_num(t, "overlap_min", cfg.track.overlap_min);
    cfg.track.match_tol = opt_num(t, "match_tol", cfg.track.match_tol);
    cfg.track.eps_ess = opt_num(t, "eps_ess", cfg.track.eps_ess);
    cfg.track.e_cap = opt_num(t, "e_cap", cfg.track.e_cap);
    cfg.track.slope_window = int(opt_num(t, "slope_window", cfg.track.slope_window));
    cfg.track.slope_div_min = opt_num(t, "slope_div_min", cfg.track.slope_div_min);
    cfg.track.slope_flat_max = opt_num(t, "slope_flat_max", cfg.track.slope_flat_max);
    cfg.track.e_div_min = opt_num(t, "e_div_min", cfg.track.e_div_min);
    cfg.track.level_margin = opt_num(t, "level_margin", cfg.track.level_margin);
    cfg.track.stitch_max_gap = int(opt_num(t, "stitch_max_gap", cfg.track.stitch_max_gap));
  }
  if (j.contains("preset")) apply_preset(cfg, j["preset"].get<std::string>());
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  cfg.track.delta_xi = cfg.delta_xi;
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_sweep_config(os.str());
}

} // namespace eqf
