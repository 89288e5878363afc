#pragma once

#include <string>
#include <vector>

#include "equatorflow/branches.hpp"
#include "equatorflow/eigensolve.hpp"
#include "equatorflow/filter.hpp"
#include "equatorflow/profile.hpp"

namespace eqf {

struct SweepConfig {
  CoriolisProfile profile;
  std::string profile_json; // canonical serialization, hashed into provenance

  double L = 11.0;
  int m = 601;
  double w_seam = 1.0;
  double xi_min = -8.0;
  double xi_max = 8.0;
  double delta_xi = 0.05;

  // eigensolve window; when full_solve the whole spectrum is kept
  bool full_solve = false;
  double e_floor_factor = 0.8; // window lower edge = eps_ess * factor
  EigOptions eig;

  FilterParams filter;
  TrackParams track;

  std::vector<double> alphas;

  std::string out_dir;
  int workers = 0; // 0: hardware_concurrency
  bool checkpoint = false;
  bool write_svg = false;

  int n_fibers() const;
  double xi_at(int k) const { return xi_min + k * delta_xi; }
  void validate() const;
  std::string canonical_text() const; // deterministic key=value dump
  uint64_t config_hash() const;       // FNV-1a over canonical_text
};

// Parses the documented JSON schema (README: configuration).  Parse errors
// cite the line, validation errors the field path.
SweepConfig parse_sweep_config(const std::string& json_text);
SweepConfig load_sweep_config(const std::string& path);
CoriolisProfile parse_profile_json(const std::string& json_text);

// presets: "desk" (m=601) and "paper" (m=5001)
void apply_preset(SweepConfig& cfg, const std::string& preset);

uint64_t fnv1a64(const std::string& text);

} // namespace eqf
