#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "magsurf/flow.hpp"

using namespace magsurf;

namespace {
constexpr double kPi = 3.14159265358979323846;

MagneticSystem flat(double b) {
  return {ChartMetric::euclidean(), FieldStrength::constant(b)};
}
}  // namespace

TEST_CASE("zero field gives straight lines") {
  Trajectory tr = integrate(flat(0.0), {{0, 0}, {0.6, 0.8}}, 5.0);
  PhasePoint p = tr.eval(5.0);
  CHECK(p.pos.x == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(p.pos.y == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(p.vel.x == doctest::Approx(0.6).epsilon(1e-10));
}

TEST_CASE("constant field traces the circle of curvature b") {
  // b = 1 from the origin heading east: circle of radius 1 about (0, 1)
  Trajectory tr = integrate(flat(1.0), {{0, 0}, {1, 0}}, 2 * kPi);
  PhasePoint half = tr.eval(kPi);
  CHECK(std::abs(half.pos.x) < 1e-9);
  CHECK(half.pos.y == doctest::Approx(2.0).epsilon(1e-10));
  PhasePoint full = tr.eval(2 * kPi);
  CHECK(std::abs(full.pos.x) < 1e-9);
  CHECK(std::abs(full.pos.y) < 1e-9);
  CHECK(full.vel.x == doctest::Approx(1.0).epsilon(1e-10));

  // b = 2 halves the radius and the period
  Trajectory t2 = integrate(flat(2.0), {{0, 0}, {1, 0}}, kPi);
  CHECK(std::abs(t2.eval(kPi).pos.x) < 1e-9);
  CHECK(std::abs(t2.eval(kPi).pos.y) < 1e-9);
}

TEST_CASE("unit speed is preserved to tolerance") {
  Trajectory tr = integrate(flat(1.0), {{0, 0}, {1, 0}}, 10.0);
  CHECK(tr.total_drift() / 10.0 < 1e-9);  // drift per unit time
  for (double t : {0.37, 2.2, 7.9}) {
    PhasePoint p = tr.eval_unit(flat(1.0), t);
    CHECK(norm(p.vel) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("dense output reproduces the nodes exactly") {
  Trajectory tr = integrate(flat(1.0), {{0, 0}, {1, 0}}, 1.0);
  const auto& ts = tr.times();
  const auto& ss = tr.samples();
  for (size_t i : {size_t(0), ts.size() / 2, ts.size() - 1}) {
    PhasePoint p = tr.eval(ts[i]);
    CHECK(p.pos.x == ss[i].pos.x);
    CHECK(p.pos.y == ss[i].pos.y);
    CHECK(p.vel.x == ss[i].vel.x);
  }
}

TEST_CASE("fourth-order convergence of the endpoint error") {
  // coarse steps keep the error above the double-precision floor
  MagneticSystem sys = flat(1.0);
  auto endpoint_err = [&](double scale) {
    StepControl c;
    c.step_scale = scale;
    Trajectory tr = integrate(sys, {{0, 0}, {1, 0}}, 2 * kPi, c);
    return norm(tr.end().pos - Vec2{0, 0});
  };
  const double e1 = endpoint_err(0.05);
  const double e2 = endpoint_err(0.025);
  CHECK(e1 / e2 > 10.0);
  CHECK(e1 / e2 < 26.0);
}

TEST_CASE("spherical equator closes after 2 pi") {
  MagneticSystem sys{ChartMetric::spherical(1.0), FieldStrength::constant(0.0)};
  // the unit chart circle is the equator; lambda = 1 there
  Vec2 end = magnetic_exp(sys, {1, 0}, {0, 1}, 2 * kPi);
  CHECK(norm(end - Vec2{1, 0}) < 1e-6);
}

TEST_CASE("hyperbolic diameters are geodesics") {
  MagneticSystem sys{ChartMetric::hyperbolic(-1.0), FieldStrength::constant(0.0)};
  Trajectory tr = integrate(sys, {{0, 0}, {0.5, 0}}, 2.0);
  for (double t : {0.5, 1.0, 2.0}) CHECK(std::abs(tr.eval(t).pos.y) < 1e-12);
  // g-length 2 along the diameter: chart radius tanh(1)
  CHECK(tr.end().pos.x == doctest::Approx(std::tanh(1.0)).epsilon(1e-9));
}

TEST_CASE("leaving the validity region throws with a witness") {
  // a spherical geodesic from the chart origin reaches the numerical
  // validity radius at t = 2 atan(r); the Poincare disk is complete and
  // its geodesics never reach the rim
  MagneticSystem sys{ChartMetric::spherical(1.0), FieldStrength::constant(0.0)};
  try {
    integrate(sys, {{0, 0}, {0.5, 0}}, 4.0);
    FAIL("expected ValidityError");
  } catch (const ValidityError& e) {
    CHECK(e.exit_time > 0.0);
    CHECK(norm(e.last_position) > 10.0);
    CHECK(std::string(e.what()).find("spherical") != std::string::npos);
  }
  MagneticSystem hyp{ChartMetric::hyperbolic(-1.0), FieldStrength::constant(0.0)};
  Trajectory tr = integrate(hyp, {{0, 0}, {0.5, 0}}, 20.0);
  CHECK(norm(tr.end().pos) < 1.0);
}

TEST_CASE("adaptive stepping agrees with the fixed grid") {
  StepControl fixed;
  StepControl adaptive;
  adaptive.adaptive = true;
  adaptive.adaptive_tol = 1e-13;
  Trajectory a = integrate(flat(1.0), {{0, 0}, {1, 0}}, 3.0, fixed);
  Trajectory b = integrate(flat(1.0), {{0, 0}, {1, 0}}, 3.0, adaptive);
  CHECK(norm(a.end().pos - b.end().pos) < 1e-9);
}

TEST_CASE("step size shrinks with field strength and curvature") {
  StepControl c;
  PhasePoint p{{0, 0}, {1, 0}};
  const double h1 = default_step(flat(1.0), p, c);
  const double h4 = default_step(flat(4.0), p, c);
  CHECK(h4 == doctest::Approx(h1 / 4.0));
  MagneticSystem sph{ChartMetric::spherical(4.0), FieldStrength::constant(0.0)};
  CHECK(default_step(sph, p, c) == doctest::Approx(c.step_scale / 2.0));
}

TEST_CASE("contract violations") {
  CHECK_THROWS_AS(integrate(flat(1.0), {{0, 0}, {1, 0}}, -1.0), ContractError);
  CHECK_THROWS_AS(magnetic_exp(flat(1.0), {0, 0}, {1, 0}, -0.5), ContractError);
}
