#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "equatorflow/common.hpp"

namespace eqf {

// One discontinuity of f.  f_odd is half the jump, f_even the mean of the
// one-sided values; positive f_odd populates the left half-jump set E_L,
// negative ones populate E_R (negated).
struct Jump {
  double y = 0.0;
  double f_plus = 0.0;
  double f_minus = 0.0;

  double f_odd() const { return 0.5 * (f_plus - f_minus); }
  double f_even() const { return 0.5 * (f_plus + f_minus); }
};

// A smooth piece of the profile on [y_from, y_to).
struct Segment {
  enum class Kind { constant, linear, tanh_ramp, table };

  Kind kind = Kind::constant;
  double y_from = 0.0;
  double y_to = 0.0;

  // constant: value = c0
  // linear:   value = c1*y + c0
  // tanh:     value = c0 + c1*tanh((y - center)/width)
  double c0 = 0.0, c1 = 0.0, center = 0.0, width = 1.0;

  // table: monotone-cubic (Fritsch-Carlson) through (ys, vs); ds are the
  // derived node slopes.
  std::vector<double> ys, vs, ds;

  double value(double y) const;
  double slope(double y) const;
  double integral(double a, double b) const; // exact antiderivative difference

  static Segment constant(double y_from, double y_to, double v);
  static Segment linear(double y_from, double y_to, double a, double b);
  static Segment tanh_ramp(double y_from, double y_to, double center,
                           double width, double amplitude, double offset);
  static Segment table(double y_from, double y_to, std::vector<double> ys,
                       std::vector<double> vs);
  // C1 smoothstep ramp from (y_from, v0, slope 0) to (y_to, v1, slope 0),
  // realized as a monotone-cubic table.
  static Segment smooth_ramp(double y_from, double y_to, double v0, double v1);
};

struct ProfileOptions {
  double plateau_halfwidth = 0.5; // eta; jumps are flanked by plateaus of width 2*eta
  double tail_slope = 1.0;        // slope of the mandatory confining tails
  double range = 16.0;            // representation half-range [-range, range]
  bool add_tails = true;          // false: lab profiles (constant f) without confinement
  double tail_floor = 1.0;        // |f| at +-range must exceed this when confining
};

// Piecewise Coriolis profile f(y) with finitely many jumps.  Immutable after
// construction; safe for concurrent reads.  Default-constructed profiles are
// empty placeholders; build through from_segments / constant / linear.
class CoriolisProfile {
public:
  CoriolisProfile() = default;
  // Validates partition, plateau widths, jump separation and (when
  // add_tails) appends linear confining tails out to +-range.
  static CoriolisProfile from_segments(std::vector<Segment> segments,
                                       const ProfileOptions& opts = {});

  static CoriolisProfile constant(double value, double range = 16.0);
  static CoriolisProfile linear(double a = 1.0, double b = 0.0,
                                double range = 16.0);

  // f(y); the right-limit value at jump ordinates.
  double evaluate(double y) const;
  double operator()(double y) const { return evaluate(y); }

  // f'(y), smooth part only; throws std::domain_error at a jump ordinate.
  double derivative(double y) const;

  // F(y) = int_0^y f(z) dz, exact per segment, F(0) = 0.
  double antiderivative(double y) const;

  const std::vector<Jump>& jumps() const { return jumps_; }
  const std::vector<Segment>& segments() const { return segments_; }

  // (E_L, E_R) as sorted multisets of half-jump values.
  std::pair<std::vector<double>, std::vector<double>> half_jump_sets() const;

  // (J_L(E), J_R(E)): counts of half-jump values strictly above E.
  // Requires E > 0 and E not on a half-jump value.
  std::pair<int, int> count_JL_JR(double E) const;

  double range() const { return range_; }
  double plateau_halfwidth() const { return plateau_halfwidth_; }

  // True when the profile carries confining tails: f(-range) < 0 < f(range)
  // with |f| above the configured floor (flow predictions require this).
  bool confining() const { return confining_; }
  void require_confining() const;

  double max_abs_f(double a, double b, int samples = 512) const;
  double max_abs_slope(double a, double b, int samples = 512) const;

private:
  std::size_t segment_index(double y) const;

  std::vector<Segment> segments_;
  std::vector<Jump> jumps_;
  std::vector<double> cumint_; // antiderivative value at each segment start
  double range_ = 0.0;
  double plateau_halfwidth_ = 0.5;
  bool confining_ = false;
};

} // namespace eqf
