#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "magsurf/index_form.hpp"

using namespace magsurf;

namespace {
constexpr double kPi = 3.14159265358979323846;

MagneticSystem flat(double b) {
  return {ChartMetric::euclidean(), FieldStrength::constant(b)};
}

FieldOnGeodesic sine_field(double T, double omega) {
  return FieldOnGeodesic::smooth(
      T, [omega](double t) { return std::sin(omega * t); },
      [omega](double t) { return omega * std::cos(omega * t); }, true, false);
}
}  // namespace

TEST_CASE("index of sin t on the flat b=1 half-circle is zero") {
  // integrand cos^2 - sin^2 integrates to exactly 0 on [0, pi/2]
  MagneticSystem sys = flat(1.0);
  Trajectory tr = integrate(sys, {{0, 0}, {1, 0}}, kPi / 2);
  const double v = index_evaluate(sys, tr, sine_field(kPi / 2, 1.0));
  CHECK(std::abs(v) < 1e-7);
}

TEST_CASE("quadrature agrees with the closed form for smooth fields") {
  // flat b=1: Ind(u e2) = int u'^2 - u^2; u = sin(2t) on [0, pi]
  MagneticSystem sys = flat(1.0);
  Trajectory tr = integrate(sys, {{0, 0}, {1, 0}}, kPi);
  const double v = index_evaluate(sys, tr, sine_field(kPi, 2.0), 16);
  // int 4cos^2(2t) - sin^2(2t) dt over [0, pi] = (4 - 1) pi / 2
  CHECK(v == doctest::Approx(1.5 * kPi).epsilon(1e-9));
}

TEST_CASE("gram spectrum crosses zero at the first conjugate time") {
  MagneticSystem sys = flat(1.0);
  Trajectory a = integrate(sys, {{0, 0}, {1, 0}}, kPi / 2);
  Trajectory b = integrate(sys, {{0, 0}, {1, 0}}, kPi);
  Trajectory c = integrate(sys, {{0, 0}, {1, 0}}, 1.5 * kPi);
  GramSummary ga = index_gram(sys, a, 64);
  GramSummary gb = index_gram(sys, b, 256);
  GramSummary gc = index_gram(sys, c, 64);
  CHECK(ga.smallest_eigenvalue > 0.0);
  CHECK(ga.negative_count == 0);
  CHECK(std::abs(gb.smallest_eigenvalue) <= 1e-3);
  CHECK(gc.smallest_eigenvalue < 0.0);
  CHECK(gc.negative_count >= 1);
}

TEST_CASE("family sweep locates the crossing near pi") {
  MagneticSystem sys = flat(1.0);
  SweepResult r = index_family_sweep(sys, {0, 0}, {1, 0}, 2.8, 3.5, 15, 128);
  REQUIRE(r.first_crossing.has_value());
  CHECK(*r.first_crossing == doctest::Approx(kPi).epsilon(0.02));
}

TEST_CASE("cut corner field is negative past the conjugate time") {
  MagneticSystem sys = flat(1.0);
  Trajectory tr = integrate(sys, {{0, 0}, {1, 0}}, 3.7);
  FieldOnGeodesic Z = cut_corner(sys, tr, kPi, 0.2);
  CHECK(Z.vanishes_at_start);
  CHECK(Z.vanishes_at_end);
  CHECK(index_evaluate(sys, tr, Z) < -1e-3);
  // the field is continuous across its breakpoints
  for (size_t i = 0; i + 1 < Z.pieces.size(); ++i) {
    const double t = Z.pieces[i].t1;
    CHECK(Z.pieces[i].u(t) ==
          doctest::Approx(Z.pieces[i + 1].u(t)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(cut_corner(sys, tr, 0.0, 0.1), ContractError);
  CHECK_THROWS_AS(cut_corner(sys, tr, kPi, 5.0), ContractError);
}

TEST_CASE("Jacobi fields minimize the index among matched endpoints") {
  MagneticSystem sys = flat(1.0);
  Trajectory tr = integrate(sys, {{0, 0}, {1, 0}}, 2.0);
  FieldOnGeodesic Z = FieldOnGeodesic::smooth(
      2.0, [](double t) { return 0.5 * std::sin(t) + 0.1 * t; },
      [](double t) { return 0.5 * std::cos(t) + 0.1; }, true, false);
  IndexLemmaReport rep = index_lemma_check(sys, tr, Z, 30, 12345);
  CHECK(rep.min_margin >= -1e-9);
  CHECK(rep.reversed_min_margin >= -1e-9);
  CHECK(rep.equality_consistent);
  CHECK(rep.jacobi_index <= rep.given_index + 1e-12);
}

TEST_CASE("lemma check enforces its preconditions") {
  MagneticSystem sys = flat(1.0);
  Trajectory long_tr = integrate(sys, {{0, 0}, {1, 0}}, 3.5);
  FieldOnGeodesic Z = sine_field(3.5, 1.0);
  CHECK_THROWS_AS(index_lemma_check(sys, long_tr, Z, 5), ContractError);

  Trajectory tr = integrate(sys, {{0, 0}, {1, 0}}, 2.0);
  FieldOnGeodesic bad = FieldOnGeodesic::smooth(
      2.0, [](double) { return 1.0; }, [](double) { return 0.0; }, false, false);
  CHECK_THROWS_AS(index_lemma_check(sys, tr, bad, 5), ContractError);
}

TEST_CASE("index values are reversal invariant") {
  MagneticSystem sys = flat(1.0);
  const double T = 2.0;
  Trajectory tr = integrate(sys, {{0, 0}, {1, 0}}, T);
  MagneticSystem rev = sys.reversed();
  Trajectory trr = integrate(rev, {tr.end().pos, -tr.end().vel}, T);
  FieldOnGeodesic Z = sine_field(T, 1.3);
  FieldOnGeodesic Zr = FieldOnGeodesic::smooth(
      T, [T](double t) { return std::sin(1.3 * (T - t)); },
      [T](double t) { return -1.3 * std::cos(1.3 * (T - t)); }, false, true);
  CHECK(index_evaluate(sys, tr, Z) ==
        doctest::Approx(index_evaluate(rev, trr, Zr)).epsilon(1e-8));
}

TEST_CASE("quadrature argument validation") {
  MagneticSystem sys = flat(1.0);
  Trajectory tr = integrate(sys, {{0, 0}, {1, 0}}, 1.0);
  CHECK_THROWS_AS(index_evaluate(sys, tr, sine_field(1.0, 1.0), 5),
                  ContractError);
  CHECK_THROWS_AS(index_gram(sys, tr, 2), ContractError);
}
