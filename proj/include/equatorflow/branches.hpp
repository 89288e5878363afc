#pragma once

#include <functional>
#include <string>
#include <vector>

#include "equatorflow/common.hpp"
#include "equatorflow/profile.hpp"

namespace eqf {

// Parameters of branch tracking, limit classification and flow counting.
struct TrackParams {
  double delta_xi = 0.05;
  double overlap_min = 0.5;   // eigenvector continuity gate
  double match_tol = 0.12;    // |E - predicted| gate (|dE/dxi| <= 1)
  double eps_ess = 0.05;      // E = 0 exclusion band
  double e_cap = 8.6;         // tracking energy window edge
  int slope_window = 5;
  double slope_div_min = 0.5;
  double slope_flat_max = 0.05;
  double e_div_min = 1.0;
  double level_margin = 0.02;
  double degenerate_gap = 1e-9; // twins closer than this are matched jointly
  int stitch_max_gap = 3;       // fibers a split branch may be rejoined across
};

struct BranchPoint {
  double xi = 0.0;
  double E = 0.0;
  int fiber = -1; // index in the xi grid
  int column = -1; // index in that fiber's kept list
};

enum class LimitKind {
  diverges_plus,  // outward slopes all steep positive, E beyond e_div_min
  diverges_minus,
  tends_to,       // outward slopes all flat; value = last E
  reaches_zero,   // terminates into the E = 0 exclusion band at interior xi
  cap_exit,       // leaves the tracking energy window
  interior_break, // tracking lost continuity mid-grid; value = last E
  undecided,      // grid edge reached with mixed slopes
};

struct LimitClass {
  LimitKind kind = LimitKind::undecided;
  double value = 0.0; // endpoint E
  double xi = 0.0;    // endpoint xi
};

struct Branch {
  int id = -1;
  std::vector<BranchPoint> points; // xi strictly increasing
  LimitClass left, right;
};

struct Crossing {
  int branch_id = -1;
  double xi_cross = 0.0;
  int direction = 0; // +1 upward, -1 downward
};

struct FlowReport {
  double alpha = 0.0;
  int sf_measured = 0;
  int sf_bec = 2;
  int sf_thm = 2;
  bool reliable = true;
  std::vector<Crossing> crossings;
  std::vector<std::string> warnings;
};

// One fiber's kept eigenpairs, vectors stored column-major (dim x count).
// Tracking consumes fibers in xi order through a producer so the full sweep
// never holds more than a handful of eigenvector blocks.
struct TrackFiber {
  double xi = 0.0;
  std::vector<double> evals;
  std::vector<cplx> vectors; // dim * evals.size(), may be empty for no pairs
  int dim = 0;
};

using FiberProducer = std::function<TrackFiber(int)>; // fiber index -> data

// Greedy adjacent-fiber continuation by predicted position, validated by
// eigenvector overlap; splits rejoined by the stitch pass afterwards.
// Throws tracking_error when two non-degenerate candidates both qualify.
std::vector<Branch> track(int n_fibers, const FiberProducer& producer,
                          const TrackParams& params);

// Rejoins branch fragments across at most stitch_max_gap missing fibers when
// the predicted continuation has exactly one candidate and no competitor.
void stitch(std::vector<Branch>& branches, const TrackParams& params);

// Classifies both ends of every branch (stitch first).
void classify_limits(std::vector<Branch>& branches, double xi_lo, double xi_hi,
                     const TrackParams& params);

// Flow at one level; profile supplies the Theorem 2.1/2.2 predictions.
FlowReport spectral_flow(const std::vector<Branch>& branches, double alpha,
                         const CoriolisProfile& profile, const TrackParams& params);

const char* limit_kind_name(LimitKind k);

} // namespace eqf
