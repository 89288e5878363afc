#include <doctest.h>

#include <cmath>

#include "equatorflow/config.hpp"
#include "equatorflow/profile.hpp"

using namespace eqf;

namespace {

// sgn(y) with unit plateaus and slope-1 confining tails
CoriolisProfile sgn_tails(double range = 16.0) {
  ProfileOptions o;
  o.range = range;
  return CoriolisProfile::from_segments(
      {Segment::constant(-1.0, 0.0, -1.0), Segment::constant(0.0, 1.0, 1.0)}, o);
}

// pure two-value sgn (lab profile, no tails)
CoriolisProfile sgn_pure(double range = 16.0) {
  ProfileOptions o;
  o.range = range;
  o.add_tails = false;
  return CoriolisProfile::from_segments(
      {Segment::constant(-range, 0.0, -1.0), Segment::constant(0.0, range, 1.0)}, o);
}

// three jumps +2, +1, -3/2 at y = -4, 0, 4, each with f_even = 0
CoriolisProfile fig4_left() {
  std::vector<Segment> segs = {
      Segment::linear(-16.0, -5.0, 1.0, 4.0),
      Segment::constant(-5.0, -4.0, -1.0),
      Segment::constant(-4.0, -3.0, 1.0),
      Segment::smooth_ramp(-3.0, -1.0, 1.0, -0.5),
      Segment::constant(-1.0, 0.0, -0.5),
      Segment::constant(0.0, 1.0, 0.5),
      Segment::smooth_ramp(1.0, 3.0, 0.5, 0.75),
      Segment::constant(3.0, 4.0, 0.75),
      Segment::constant(4.0, 5.0, -0.75),
      Segment::linear(5.0, 16.0, 1.0, -5.75),
  };
  ProfileOptions o;
  o.range = 16.0;
  return CoriolisProfile::from_segments(std::move(segs), o);
}

} // namespace

TEST_CASE("evaluate: linear, plateau, tanh") {
  auto lin = CoriolisProfile::linear();
  CHECK(lin.evaluate(3.0) == doctest::Approx(3.0));

  auto sgn = sgn_tails();
  CHECK(sgn.evaluate(0.1) == doctest::Approx(1.0));
  CHECK(sgn.evaluate(-0.1) == doctest::Approx(-1.0));
  CHECK(sgn.evaluate(0.0) == doctest::Approx(1.0)); // right limit at the jump

  ProfileOptions o;
  o.add_tails = false;
  auto th = CoriolisProfile::from_segments(
      {Segment::tanh_ramp(-16.0, 16.0, 0.0, 1.0, 1.0, 0.0)}, o);
  CHECK(th.evaluate(0.0) == doctest::Approx(0.0));
  CHECK(th.evaluate(2.0) == doctest::Approx(std::tanh(2.0)));
}

TEST_CASE("evaluate: out of range") {
  auto lin = CoriolisProfile::linear();
  CHECK_THROWS_AS(lin.evaluate(17.0), std::out_of_range);
}

TEST_CASE("derivative: smooth segments and jump ordinates") {
  auto lin = CoriolisProfile::linear();
  CHECK(lin.derivative(0.37) == doctest::Approx(1.0));

  auto sgn = sgn_tails();
  CHECK(sgn.derivative(0.5) == doctest::Approx(0.0));  // plateau
  CHECK(sgn.derivative(2.5) == doctest::Approx(1.0));  // tail
  CHECK_THROWS_AS(sgn.derivative(0.0), std::domain_error);

  ProfileOptions o;
  o.add_tails = false;
  auto th = CoriolisProfile::from_segments(
      {Segment::tanh_ramp(-16.0, 16.0, 0.0, 1.0, 1.0, 0.0)}, o);
  CHECK(th.derivative(0.0) == doctest::Approx(1.0));
}

TEST_CASE("derivative agrees with centered differences to second order") {
  ProfileOptions o;
  o.add_tails = false;
  auto th = CoriolisProfile::from_segments(
      {Segment::tanh_ramp(-16.0, 16.0, 0.3, 0.7, 2.0, 0.5)}, o);
  for (double y : {-2.0, -0.3, 0.0, 0.4, 1.7}) {
    double h1 = 1e-3, h2 = 5e-4;
    double d = th.derivative(y);
    double e1 = std::abs((th.evaluate(y + h1) - th.evaluate(y - h1)) / (2 * h1) - d);
    double e2 = std::abs((th.evaluate(y + h2) - th.evaluate(y - h2)) / (2 * h2) - d);
    CHECK(e1 < 1e-5);
    CHECK(e2 < 0.3 * e1 + 1e-12); // ~4x shrink
  }
}

TEST_CASE("antiderivative: exact values and continuity") {
  auto lin = CoriolisProfile::linear();
  CHECK(lin.antiderivative(2.0) == doctest::Approx(2.0)); // y^2/2
  CHECK(lin.antiderivative(0.0) == doctest::Approx(0.0));

  auto sp = sgn_pure();
  CHECK(sp.antiderivative(-3.0) == doctest::Approx(3.0)); // |y|

  ProfileOptions o;
  o.add_tails = false;
  auto th = CoriolisProfile::from_segments(
      {Segment::tanh_ramp(-16.0, 16.0, 0.0, 1.0, 1.0, 0.0)}, o);
  CHECK(th.antiderivative(1.0) ==
        doctest::Approx(std::log(std::cosh(1.0))).epsilon(1e-10));

  // F continuous across a jump (f bounded)
  auto sgn = sgn_tails();
  double eps = 1e-9;
  CHECK(std::abs(sgn.antiderivative(eps) - sgn.antiderivative(-eps)) < 1e-8);
}

TEST_CASE("half-jump sets") {
  auto f4 = fig4_left();
  auto [el, er] = f4.half_jump_sets();
  REQUIRE(el.size() == 2);
  REQUIRE(er.size() == 1);
  CHECK(el[0] == doctest::Approx(0.5));
  CHECK(el[1] == doctest::Approx(1.0));
  CHECK(er[0] == doctest::Approx(0.75));

  auto lin = CoriolisProfile::linear();
  auto [el2, er2] = lin.half_jump_sets();
  CHECK(el2.empty());
  CHECK(er2.empty());

  // two jumps of size -2
  ProfileOptions o;
  o.range = 16.0;
  auto two_neg = CoriolisProfile::from_segments(
      {Segment::linear(-16.0, -4.0, 1.0, 5.0), Segment::constant(-4.0, -3.0, 1.0),
       Segment::constant(-3.0, -2.0, -1.0), Segment::smooth_ramp(-2.0, 2.0, -1.0, 1.0),
       Segment::constant(2.0, 3.0, 1.0), Segment::constant(3.0, 4.0, -1.0),
       Segment::linear(4.0, 16.0, 1.0, -5.0)},
      o);
  auto [el3, er3] = two_neg.half_jump_sets();
  CHECK(el3.empty());
  REQUIRE(er3.size() == 2);
  CHECK(er3[0] == doctest::Approx(1.0));
  CHECK(er3[1] == doctest::Approx(1.0));
}

TEST_CASE("count_JL_JR on the three-jump profile") {
  auto f4 = fig4_left();
  auto [jl1, jr1] = f4.count_JL_JR(0.3);
  CHECK(jl1 == 2);
  CHECK(jr1 == 1);
  auto [jl2, jr2] = f4.count_JL_JR(0.6);
  CHECK(jl2 == 1);
  CHECK(jr2 == 1);
  auto [jl3, jr3] = f4.count_JL_JR(9.0);
  CHECK(jl3 == 0);
  CHECK(jr3 == 0);
  CHECK_THROWS_AS(f4.count_JL_JR(0.75), std::domain_error);
  CHECK_THROWS_AS(f4.count_JL_JR(-0.5), std::domain_error);

  // non-increasing in E, component-wise
  int prev_jl = 99, prev_jr = 99;
  for (double e : {0.1, 0.3, 0.55, 0.6, 0.8, 0.9, 1.2, 2.0}) {
    auto [jl, jr] = f4.count_JL_JR(e);
    CHECK(jl <= prev_jl);
    CHECK(jr <= prev_jr);
    prev_jl = jl;
    prev_jr = jr;
  }
}

TEST_CASE("jump bookkeeping identities") {
  auto f4 = fig4_left();
  REQUIRE(f4.jumps().size() == 3);
  for (const auto& j : f4.jumps()) {
    CHECK(j.f_even() + j.f_odd() == doctest::Approx(j.f_plus).epsilon(1e-14));
    CHECK(j.f_even() - j.f_odd() == doctest::Approx(j.f_minus).epsilon(1e-14));
    CHECK(std::abs(j.f_plus - j.f_minus) > 0);
    // plateau values on both sides
    CHECK(f4.evaluate(j.y - 0.5) == doctest::Approx(j.f_minus));
    CHECK(f4.evaluate(j.y + 0.5) == doctest::Approx(j.f_plus));
  }
}

TEST_CASE("construction validation") {
  ProfileOptions o;
  o.range = 16.0;
  // gap between segments
  CHECK_THROWS_AS(CoriolisProfile::from_segments(
                      {Segment::constant(-16.0, 0.0, -1.0),
                       Segment::constant(0.5, 16.0, 1.0)},
                      o),
                  std::invalid_argument);
  // jumps closer than 4*eta
  CHECK_THROWS_AS(CoriolisProfile::from_segments(
                      {Segment::constant(-16.0, 0.0, -1.0),
                       Segment::constant(0.0, 1.0, 1.0),
                       Segment::constant(1.0, 16.0, 3.0)},
                      o),
                  std::invalid_argument);
  // ramp touching the jump violates the plateau assumption
  CHECK_THROWS_AS(CoriolisProfile::from_segments(
                      {Segment::linear(-16.0, 0.0, 1.0, 0.0),
                       Segment::constant(0.0, 16.0, 2.0)},
                      o),
                  std::invalid_argument);
}

TEST_CASE("confinement") {
  auto sgn = sgn_tails();
  CHECK(sgn.confining());
  CHECK_NOTHROW(sgn.require_confining());

  auto c = CoriolisProfile::constant(2.0);
  CHECK(!c.confining());
  CHECK_THROWS_AS(c.require_confining(), std::invalid_argument);
  CHECK(c.evaluate(5.0) == doctest::Approx(2.0));
}

TEST_CASE("profile json parsing") {
  const char* text = R"({
    "profile": {
      "plateau_halfwidth": 0.5,
      "tail_slope": 1.0,
      "range": 16.0,
      "segments": [
        {"kind": "constant", "y_from": -1, "y_to": 0, "value": -1},
        {"kind": "constant", "y_from": 0, "y_to": 1, "value": 1}
      ]
    }
  })";
  auto p = parse_profile_json(text);
  REQUIRE(p.jumps().size() == 1);
  CHECK(p.jumps()[0].f_odd() == doctest::Approx(1.0));
  CHECK(p.confining());

  CHECK_THROWS_WITH_AS(parse_profile_json("{\"profile\": {\"segments\": []}}"),
                       doctest::Contains("profile.segments"), config_error);
  CHECK_THROWS_WITH_AS(parse_profile_json("{\n\"profile\": oops}"),
                       doctest::Contains("line 2"), config_error);
  CHECK_THROWS_WITH_AS(
      parse_profile_json(
          R"({"profile":{"segments":[{"kind":"linear","y_from":0,"y_to":1}]}})"),
      doctest::Contains("segments[0].a"), config_error);
}
