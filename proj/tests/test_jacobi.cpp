#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "magsurf/jacobi.hpp"

using namespace magsurf;

namespace {
constexpr double kPi = 3.14159265358979323846;

MagneticSystem flat(double b) {
  return {ChartMetric::euclidean(), FieldStrength::constant(b)};
}
}  // namespace

TEST_CASE("coefficients on the flat constant-field system") {
  JacobiCoeffs c = jacobi_coeffs(flat(1.0), {{0.3, 0.1}, {0, 1}});
  CHECK(c.b == doctest::Approx(1.0));
  CHECK(c.db_e1 == doctest::Approx(0.0));
  CHECK(c.db_e2 == doctest::Approx(0.0));
  CHECK(c.K == doctest::Approx(0.0));

  MagneticSystem var{ChartMetric::euclidean(),
                     FieldStrength::expression(Expr::parse("x"))};
  // e1 = (1,0): db.e1 = 1; e2 = (0,1): db.e2 = 0
  JacobiCoeffs v = jacobi_coeffs(var, {{2.0, 0.0}, {1, 0}});
  CHECK(v.b == doctest::Approx(2.0));
  CHECK(v.db_e1 == doctest::Approx(1.0));
  CHECK(v.db_e2 == doctest::Approx(0.0));
}

TEST_CASE("flat b=1 Jacobi field has the closed form") {
  // J(0)=0, J'(0)=e2: f1 = 1-cos t, f2 = sin t, g1 = sin t, g2 = cos t
  MagneticSystem sys = flat(1.0);
  Trajectory tr = integrate(sys, {{0, 0}, {1, 0}}, 2 * kPi);
  JacobiState J = propagate_jacobi(sys, tr, {0, 0}, {0, 1});
  for (double t : {0.3, 1.0, kPi / 2, kPi, 5.0}) {
    auto f = J.eval(t);
    CHECK(f[0] == doctest::Approx(1 - std::cos(t)).epsilon(1e-9));
    CHECK(f[1] == doctest::Approx(std::sin(t)).epsilon(1e-9));
    CHECK(f[2] == doctest::Approx(std::sin(t)).epsilon(1e-9));
    CHECK(f[3] == doctest::Approx(std::cos(t)).epsilon(1e-9));
  }
}

TEST_CASE("conserved pairing of J' with gamma'") {
  MagneticSystem sys = flat(1.0);
  Trajectory tr = integrate(sys, {{0, 0}, {1, 0}}, 10.0);
  JacobiState J = propagate_jacobi(sys, tr, {0.2, -0.1}, {0, 0.4});
  for (double t = 0.0; t <= 10.0; t += 0.5)
    CHECK(std::abs(J.jprime_dot_gamma(t)) < 1e-8);
}

TEST_CASE("initial derivative must be perpendicular to the orbit") {
  MagneticSystem sys = flat(1.0);
  Trajectory tr = integrate(sys, {{0, 0}, {1, 0}}, 1.0);
  CHECK_THROWS_AS(propagate_jacobi(sys, tr, {0, 0}, {0.5, 0.1}), ContractError);
}

TEST_CASE("symplectic pairing vanishes for fields vanishing at 0") {
  MagneticSystem sys{ChartMetric::spherical(1.0), FieldStrength::constant(0.5)};
  PhasePoint s0{{0.2, 0.1}, {0, 0}};
  s0.vel = {0, 1.0 / sys.chart.lambda(s0.pos)};
  Trajectory tr = integrate(sys, s0, 8.0);
  Vec2 e2 = rot90(tr.start().vel);
  JacobiState Jv = propagate_jacobi(sys, tr, {0, 0}, e2);
  JacobiState Jw = propagate_jacobi(sys, tr, {0, 0}, 0.7 * e2);
  for (int i = 1; i <= 10; ++i)
    CHECK(std::abs(symplectic_pairing(Jv, Jw, sys, tr, 0.8 * i)) < 1e-8);
}

TEST_CASE("symplectic pairing is constant for general pairs") {
  MagneticSystem sys = flat(1.0);
  Trajectory tr = integrate(sys, {{0, 0}, {1, 0}}, 6.0);
  Vec2 e2 = rot90(tr.start().vel);
  JacobiState Jv = propagate_jacobi(sys, tr, {0.3, 0.0}, e2);
  JacobiState Jw = propagate_jacobi(sys, tr, {0.1, 0.5}, -0.2 * e2);
  const double w0 = symplectic_pairing(Jv, Jw, sys, tr, 0.0);
  for (double t : {1.0, 3.0, 6.0})
    CHECK(symplectic_pairing(Jv, Jw, sys, tr, t) ==
          doctest::Approx(w0).epsilon(1e-8));
}

TEST_CASE("pairing refuses states from different trajectories") {
  MagneticSystem sys = flat(1.0);
  Trajectory t1 = integrate(sys, {{0, 0}, {1, 0}}, 2.0);
  Trajectory t2 = integrate(sys, {{0.5, 0}, {1, 0}}, 2.0);
  JacobiState Jv = propagate_jacobi(sys, t1, {0, 0}, {0, 1});
  JacobiState Jw = propagate_jacobi(sys, t2, {0, 0}, {0, 1});
  CHECK_THROWS_AS(symplectic_pairing(Jv, Jw, sys, t1, 1.0), ContractError);
}

TEST_CASE("Jacobi field matches the finite difference of the exponential") {
  double r1 = variational_consistency(flat(1.0), {0, 0}, {1, 0}, {0, 1}, 1.0, 1e-4);
  CHECK(r1 < 1e-3);
  MagneticSystem sph{ChartMetric::spherical(1.0), FieldStrength::constant(0.5)};
  const double l = sph.chart.lambda({0.3, 0.1});
  double r2 = variational_consistency(sph, {0.3, 0.1}, {0, 1.0 / l},
                                      {1.0 / l, 0}, 1.0, 1e-4);
  CHECK(r2 < 1e-3);
  CHECK(variational_consistency(flat(1.0), {0, 0}, {1, 0}, {0, 1}, 0.0, 1e-4) ==
        0.0);
  CHECK_THROWS_AS(
      variational_consistency(flat(1.0), {0, 0}, {1, 0}, {0, 2}, 1.0, 1e-4),
      ContractError);
}

TEST_CASE("first conjugate times") {
  auto c1 = first_conjugate(flat(1.0), {0, 0}, {1, 0}, 10.0);
  REQUIRE(c1.has_value());
  CHECK(c1->t == doctest::Approx(kPi).epsilon(1e-7));
  CHECK(c1->multiplicity == 1);

  MagneticSystem sph{ChartMetric::spherical(1.0), FieldStrength::constant(0.0)};
  auto c2 = first_conjugate(sph, {1, 0}, {0, 1}, 10.0);
  REQUIRE(c2.has_value());
  CHECK(c2->t == doctest::Approx(kPi).epsilon(1e-5));

  StepControl coarse;
  coarse.step_scale = 1e-2;
  CHECK_FALSE(first_conjugate(flat(0.0), {0, 0}, {1, 0}, 100.0, coarse));

  // hyperbolic with b = 0: no conjugate points ever
  MagneticSystem hyp{ChartMetric::hyperbolic(-1.0), FieldStrength::constant(0.0)};
  CHECK_FALSE(first_conjugate(hyp, {0, 0}, {1, 0}, 3.0));
}
