#include "equatorflow/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eqf {

namespace {

double ln_cosh(double x) {
  // stable for large |x|: ln cosh x = |x| + ln((1+e^{-2|x|})/2)
  double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

} // namespace

Segment Segment::constant(double y_from, double y_to, double v) {
  Segment s;
  s.kind = Kind::constant;
  s.y_from = y_from;
  s.y_to = y_to;
  s.c0 = v;
  return s;
}

Segment Segment::linear(double y_from, double y_to, double a, double b) {
  Segment s;
  s.kind = Kind::linear;
  s.y_from = y_from;
  s.y_to = y_to;
  s.c1 = a;
  s.c0 = b;
  return s;
}

Segment Segment::tanh_ramp(double y_from, double y_to, double center,
                           double width, double amplitude, double offset) {
  if (width <= 0)
    throw std::invalid_argument("tanh segment: width must be positive");
  Segment s;
  s.kind = Kind::tanh_ramp;
  s.y_from = y_from;
  s.y_to = y_to;
  s.center = center;
  s.width = width;
  s.c1 = amplitude;
  s.c0 = offset;
  return s;
}

Segment Segment::table(double y_from, double y_to, std::vector<double> ys,
                       std::vector<double> vs) {
  if (ys.size() < 2 || ys.size() != vs.size())
    throw std::invalid_argument("table segment: need >= 2 matched samples");
  for (std::size_t i = 1; i < ys.size(); ++i)
    if (!(ys[i] > ys[i - 1]))
      throw std::invalid_argument("table segment: ys must be strictly increasing");
  Segment s;
  s.kind = Kind::table;
  s.y_from = y_from;
  s.y_to = y_to;
  s.ys = std::move(ys);
  s.vs = std::move(vs);

  // Fritsch-Carlson monotone slopes.
  const std::size_t n = s.ys.size();
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    d[i] = (s.vs[i + 1] - s.vs[i]) / (s.ys[i + 1] - s.ys[i]);
  s.ds.assign(n, 0.0);
  s.ds[0] = d[0];
  s.ds[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i)
    s.ds[i] = (d[i - 1] * d[i] > 0) ? 0.5 * (d[i - 1] + d[i]) : 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      s.ds[i] = s.ds[i + 1] = 0.0;
      continue;
    }
    double a = s.ds[i] / d[i], b = s.ds[i + 1] / d[i];
    double r = a * a + b * b;
    if (r > 9.0) {
      double t = 3.0 / std::sqrt(r);
      s.ds[i] = t * a * d[i];
      s.ds[i + 1] = t * b * d[i];
    }
  }
  return s;
}

Segment Segment::smooth_ramp(double y_from, double y_to, double v0, double v1) {
  const int k = 9;
  std::vector<double> ys(k), vs(k);
  for (int i = 0; i < k; ++i) {
    double t = double(i) / (k - 1);
    ys[i] = y_from + (y_to - y_from) * t;
    vs[i] = v0 + (v1 - v0) * t * t * (3 - 2 * t);
  }
  return table(y_from, y_to, std::move(ys), std::move(vs));
}

double Segment::value(double y) const {
  switch (kind) {
  case Kind::constant:
    return c0;
  case Kind::linear:
    return c1 * y + c0;
  case Kind::tanh_ramp:
    return c0 + c1 * std::tanh((y - center) / width);
  case Kind::table: {
    auto it = std::upper_bound(ys.begin(), ys.end(), y);
    std::size_t i = (it == ys.begin()) ? 0 : (it - ys.begin() - 1);
    if (i >= ys.size() - 1) i = ys.size() - 2;
    double hx = ys[i + 1] - ys[i], t = (y - ys[i]) / hx;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    return h00 * vs[i] + h10 * hx * ds[i] + h01 * vs[i + 1] + h11 * hx * ds[i + 1];
  }
  }
  return 0.0;
}

double Segment::slope(double y) const {
  switch (kind) {
  case Kind::constant:
    return 0.0;
  case Kind::linear:
    return c1;
  case Kind::tanh_ramp: {
    double t = std::tanh((y - center) / width);
    return c1 * (1 - t * t) / width;
  }
  case Kind::table: {
    auto it = std::upper_bound(ys.begin(), ys.end(), y);
    std::size_t i = (it == ys.begin()) ? 0 : (it - ys.begin() - 1);
    if (i >= ys.size() - 1) i = ys.size() - 2;
    double hx = ys[i + 1] - ys[i], t = (y - ys[i]) / hx;
    double g00 = 6 * t * (t - 1) / hx;
    double g10 = (3 * t - 1) * (t - 1);
    double g01 = -g00;
    double g11 = t * (3 * t - 2);
    return g00 * vs[i] + g10 * ds[i] + g01 * vs[i + 1] + g11 * ds[i + 1];
  }
  }
  return 0.0;
}

double Segment::integral(double a, double b) const {
  switch (kind) {
  case Kind::constant:
    return c0 * (b - a);
  case Kind::linear:
    return 0.5 * c1 * (b * b - a * a) + c0 * (b - a);
  case Kind::tanh_ramp:
    return c0 * (b - a) +
           c1 * width * (ln_cosh((b - center) / width) - ln_cosh((a - center) / width));
  case Kind::table: {
    // exact integral of the piecewise cubic
    auto cell_integral = [&](std::size_t i, double t0, double t1) {
      double hx = ys[i + 1] - ys[i];
      auto I = [](double t, double p3, double p2, double p1, double p0) {
        return p3 * t * t * t * t / 4 + p2 * t * t * t / 3 + p1 * t * t / 2 + p0 * t;
      };
      // h00 = 2t^3-3t^2+1, h10 = t^3-2t^2+t, h01 = -2t^3+3t^2, h11 = t^3-t^2
      double i00 = I(t1, 2, -3, 0, 1) - I(t0, 2, -3, 0, 1);
      double i10 = I(t1, 1, -2, 1, 0) - I(t0, 1, -2, 1, 0);
      double i01 = I(t1, -2, 3, 0, 0) - I(t0, -2, 3, 0, 0);
      double i11 = I(t1, 1, -1, 0, 0) - I(t0, 1, -1, 0, 0);
      return hx * (i00 * vs[i] + i10 * hx * ds[i] + i01 * vs[i + 1] + i11 * hx * ds[i + 1]);
    };
    double lo = std::min(a, b), hi = std::max(a, b), sum = 0.0;
    for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
      double cl = std::max(lo, ys[i]), ch = std::min(hi, ys[i + 1]);
      if (cl >= ch) continue;
      double hx = ys[i + 1] - ys[i];
      sum += cell_integral(i, (cl - ys[i]) / hx, (ch - ys[i]) / hx);
    }
    // clamp-extend beyond the table ends with the end values
    if (lo < ys.front()) sum += vs.front() * (std::min(hi, ys.front()) - lo);
    if (hi > ys.back()) sum += vs.back() * (hi - std::max(lo, ys.back()));
    return (b >= a) ? sum : -sum;
  }
  }
  return 0.0;
}

CoriolisProfile CoriolisProfile::from_segments(std::vector<Segment> segments,
                                               const ProfileOptions& opts) {
  if (segments.empty())
    throw std::invalid_argument("profile: at least one segment required");
  std::sort(segments.begin(), segments.end(),
            [](const Segment& a, const Segment& b) { return a.y_from < b.y_from; });
  for (const auto& s : segments)
    if (!(s.y_to > s.y_from))
      throw std::invalid_argument("profile: segment with empty interval");
  for (std::size_t i = 1; i < segments.size(); ++i) {
    if (std::abs(segments[i].y_from - segments[i - 1].y_to) > 1e-12) {
      std::ostringstream os;
      os << "profile: gap or overlap between segments at y="
         << segments[i - 1].y_to << " vs " << segments[i].y_from;
      throw std::invalid_argument(os.str());
    }
  }

  CoriolisProfile p;
  p.plateau_halfwidth_ = opts.plateau_halfwidth;
  p.range_ = opts.range;

  if (opts.add_tails) {
    // mandatory linear confining tails beyond the outermost user segments
    const Segment& first = segments.front();
    const Segment& last = segments.back();
    if (first.y_from > -opts.range) {
      double v = first.value(first.y_from);
      double a = opts.tail_slope;
      segments.insert(segments.begin(),
                      Segment::linear(-opts.range, first.y_from, a,
                                      v - a * first.y_from));
    }
    if (last.y_to < opts.range) {
      double v = last.value(last.y_to);
      double a = opts.tail_slope;
      segments.push_back(
          Segment::linear(last.y_to, opts.range, a, v - a * last.y_to));
    }
  } else {
    if (segments.front().y_from > -opts.range || segments.back().y_to < opts.range)
      throw std::invalid_argument(
          "profile: segments must cover [-range, range] when tails are disabled");
  }
  if (segments.front().y_from > -opts.range || segments.back().y_to < opts.range)
    throw std::invalid_argument("profile: coverage of [-range, range] failed");

  // derive jumps from value mismatches at interior boundaries
  for (std::size_t i = 1; i < segments.size(); ++i) {
    double yb = segments[i].y_from;
    double fm = segments[i - 1].value(yb);
    double fp = segments[i].value(yb);
    if (std::abs(fp - fm) > 1e-12) {
      Jump j;
      j.y = yb;
      j.f_plus = fp;
      j.f_minus = fm;
      p.jumps_.push_back(j);
    }
  }

  // jump separation and plateau checks
  const double eta = opts.plateau_halfwidth;
  for (std::size_t k = 1; k < p.jumps_.size(); ++k)
    if (p.jumps_[k].y - p.jumps_[k - 1].y < 4 * eta) {
      std::ostringstream os;
      os << "profile: jumps at y=" << p.jumps_[k - 1].y << " and y="
         << p.jumps_[k].y << " closer than 4*eta=" << 4 * eta;
      throw std::invalid_argument(os.str());
    }

  p.segments_ = std::move(segments);
  p.cumint_.resize(p.segments_.size() + 1);
  p.cumint_[0] = 0.0;
  for (std::size_t i = 0; i < p.segments_.size(); ++i)
    p.cumint_[i + 1] =
        p.cumint_[i] + p.segments_[i].integral(p.segments_[i].y_from, p.segments_[i].y_to);

  // plateau sampling check: f constant on (y_j - 2eta, y_j) and (y_j, y_j + 2eta)
  for (const auto& j : p.jumps_) {
    for (int s = 1; s <= 8; ++s) {
      double dl = j.y - (2 * eta) * s / 9.0;
      double dr = j.y + (2 * eta) * s / 9.0;
      if (dl > -p.range_ && std::abs(p.evaluate(dl) - j.f_minus) > 1e-9) {
        std::ostringstream os;
        os << "profile: f not constant on the left plateau of the jump at y=" << j.y;
        throw std::invalid_argument(os.str());
      }
      if (dr < p.range_ && std::abs(p.evaluate(dr) - j.f_plus) > 1e-9) {
        std::ostringstream os;
        os << "profile: f not constant on the right plateau of the jump at y=" << j.y;
        throw std::invalid_argument(os.str());
      }
    }
  }

  if (opts.add_tails) {
    double fl = p.evaluate(-opts.range), fr = p.evaluate(opts.range);
    p.confining_ = (fl < -opts.tail_floor + 1e-12) && (fr > opts.tail_floor - 1e-12);
    if (!p.confining_) {
      std::ostringstream os;
      os << "profile: confining tails invalid: f(-range)=" << fl
         << ", f(range)=" << fr << " (floor " << opts.tail_floor << ")";
      throw std::invalid_argument(os.str());
    }
  }
  return p;
}

CoriolisProfile CoriolisProfile::constant(double value, double range) {
  ProfileOptions o;
  o.range = range;
  o.add_tails = false;
  return from_segments({Segment::constant(-range, range, value)}, o);
}

CoriolisProfile CoriolisProfile::linear(double a, double b, double range) {
  ProfileOptions o;
  o.range = range;
  o.add_tails = false;
  CoriolisProfile p = from_segments({Segment::linear(-range, range, a, b)}, o);
  p.confining_ = a > 0; // strictly increasing line is confining on its own
  return p;
}

std::size_t CoriolisProfile::segment_index(double y) const {
  // segments are half-open [y_from, y_to); the last one includes its right end
  std::size_t lo = 0, hi = segments_.size();
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (y < segments_[mid].y_from)
      hi = mid;
    else
      lo = mid;
  }
  return lo;
}

double CoriolisProfile::evaluate(double y) const {
  if (segments_.empty())
    throw std::logic_error("profile: empty (default-constructed) profile");
  if (y < -range_ - 1e-12 || y > range_ + 1e-12) {
    std::ostringstream os;
    os << "profile: y=" << y << " outside representation range [" << -range_
       << ", " << range_ << "]";
    throw std::out_of_range(os.str());
  }
  return segments_[segment_index(y)].value(y);
}

double CoriolisProfile::derivative(double y) const {
  for (const auto& j : jumps_)
    if (y == j.y) {
      std::ostringstream os;
      os << "profile: derivative requested at the jump ordinate y=" << j.y
         << "; one-sided values differ";
      throw std::domain_error(os.str());
    }
  if (y < -range_ - 1e-12 || y > range_ + 1e-12)
    throw std::out_of_range("profile: derivative outside representation range");
  return segments_[segment_index(y)].slope(y);
}

double CoriolisProfile::antiderivative(double y) const {
  if (y < -range_ - 1e-12 || y > range_ + 1e-12)
    throw std::out_of_range("profile: antiderivative outside representation range");
  auto upto = [&](double t) {
    std::size_t i = segment_index(t);
    return cumint_[i] + segments_[i].integral(segments_[i].y_from, t);
  };
  return upto(y) - upto(0.0);
}

std::pair<std::vector<double>, std::vector<double>>
CoriolisProfile::half_jump_sets() const {
  std::vector<double> el, er;
  for (const auto& j : jumps_) {
    double fo = j.f_odd();
    if (fo > 0)
      el.push_back(fo);
    else
      er.push_back(-fo);
  }
  std::sort(el.begin(), el.end());
  std::sort(er.begin(), er.end());
  return {el, er};
}

std::pair<int, int> CoriolisProfile::count_JL_JR(double E) const {
  if (!(E > 0))
    throw std::domain_error("count_JL_JR: level must be positive");
  auto [el, er] = half_jump_sets();
  for (double v : el)
    if (std::abs(v - E) < 1e-12)
      throw std::domain_error("count_JL_JR: level coincides with a half-jump value");
  for (double v : er)
    if (std::abs(v - E) < 1e-12)
      throw std::domain_error("count_JL_JR: level coincides with a half-jump value");
  int jl = int(std::count_if(el.begin(), el.end(), [&](double v) { return v > E; }));
  int jr = int(std::count_if(er.begin(), er.end(), [&](double v) { return v > E; }));
  return {jl, jr};
}

void CoriolisProfile::require_confining() const {
  if (!confining_)
    throw std::invalid_argument(
        "profile is not confining (f(y)*sgn(y) must grow at the range ends); "
        "flow predictions are undefined for it");
}

double CoriolisProfile::max_abs_f(double a, double b, int samples) const {
  double m = 0.0;
  for (int i = 0; i <= samples; ++i) {
    double y = a + (b - a) * i / samples;
    m = std::max(m, std::abs(evaluate(y)));
  }
  return m;
}

double CoriolisProfile::max_abs_slope(double a, double b, int samples) const {
  double m = 0.0;
  for (int i = 0; i <= samples; ++i) {
    double y = a + (b - a) * i / samples;
    bool at_jump = false;
    for (const auto& j : jumps_)
      if (y == j.y) at_jump = true;
    if (at_jump) continue;
    m = std::max(m, std::abs(segments_[segment_index(y)].slope(y)));
  }
  return m;
}

} // namespace eqf
