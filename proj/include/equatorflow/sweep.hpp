#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "equatorflow/branches.hpp"
#include "equatorflow/config.hpp"
#include "equatorflow/filter.hpp"

namespace eqf {

// One row per computed eigenpair (kept and rejected) of one fiber.
struct PairRecord {
  double E = 0.0;
  double residual = 0.0;
  double v_fraction = 0.0; // |v-component|^2 share of the unit vector
  FilterDiagnostics diag;
};

struct FiberSummary {
  double xi = 0.0;
  int n_pairs = 0;
  int n_kept = 0;
  std::vector<PairRecord> rows; // eigenvalue ascending
};

struct SweepResult {
  std::vector<FiberSummary> fibers;
  std::vector<Branch> branches;
  std::vector<FlowReport> flows;

  struct Provenance {
    uint64_t config_hash = 0;
    std::string version;
    double wall_seconds = 0.0; // not part of result_hash or the exports
  } provenance;

  std::string fibers_csv() const;
  std::string branches_csv() const;
  std::string flow_report_text() const;
  std::string spectrum_svg() const;
  uint64_t result_hash() const; // FNV over the deterministic exports
};

// Full pipeline: assemble/solve fibers in a worker pool, filter, track in xi
// order, stitch, classify, compute the flow at every alpha, write exports.
SweepResult run_sweep(const SweepConfig& cfg);

struct SelfTestReport {
  bool pass = true;
  double max_gamma_asymmetry = 0.0;
  double max_trace_error = 0.0;
  bool window_consistency = true;
  bool constant_closed_form = true; // trivially true for non-constant profiles
  std::vector<std::string> lines;
};

// Gamma-symmetry across the grid, window/full consistency on sampled fibers,
// trace identity, and the constant-profile closed form when applicable.
// gamma_break_epsilon != 0 enables the deliberate symmetry-breaking hook.
SelfTestReport self_test(const SweepConfig& cfg, double gamma_break_epsilon = 0.0);

void write_text_file(const std::string& path, const std::string& content);

} // namespace eqf
