#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "magsurf/chart.hpp"
#include "magsurf/magnetic.hpp"

using namespace magsurf;

namespace {

// Curvature from lambda values only: K = -laplacian(log lambda) / lambda^2.
double curvature_fd(const ChartMetric& c, Vec2 p, double h = 1e-4) {
  auto L = [&](double x, double y) { return std::log(c.lambda({x, y})); };
  const double lap = (L(p.x + h, p.y) + L(p.x - h, p.y) + L(p.x, p.y + h) +
                      L(p.x, p.y - h) - 4.0 * L(p.x, p.y)) /
                     (h * h);
  const double l = c.lambda(p);
  return -lap / (l * l);
}

}  // namespace

TEST_CASE("expression parsing and jets") {
  Expr e = Expr::parse("2*exp(-(x^2+y^2)/0.5) + sin(x)*cos(y)");
  Jet2 j = e.eval(0.3, -0.2);
  auto f = [](double x, double y) {
    return 2 * std::exp(-(x * x + y * y) / 0.5) + std::sin(x) * std::cos(y);
  };
  CHECK(j.v == doctest::Approx(f(0.3, -0.2)).epsilon(1e-14));
  const double h = 1e-5;
  CHECK(j.dx ==
        doctest::Approx((f(0.3 + h, -0.2) - f(0.3 - h, -0.2)) / (2 * h))
            .epsilon(1e-8));
  CHECK(j.dy ==
        doctest::Approx((f(0.3, -0.2 + h) - f(0.3, -0.2 - h)) / (2 * h))
            .epsilon(1e-8));
  CHECK(j.dxx == doctest::Approx((f(0.3 + h, -0.2) - 2 * f(0.3, -0.2) +
                                  f(0.3 - h, -0.2)) /
                                 (h * h))
                     .epsilon(1e-4));
  CHECK(j.dxy == doctest::Approx((f(0.3 + h, -0.2 + h) - f(0.3 + h, -0.2 - h) -
                                  f(0.3 - h, -0.2 + h) + f(0.3 - h, -0.2 - h)) /
                                 (4 * h * h))
                     .epsilon(1e-4));
}

TEST_CASE("expression errors carry a position") {
  CHECK_THROWS_AS(Expr::parse("1 + * 2"), ExprError);
  CHECK_THROWS_AS(Expr::parse("sin(x"), ExprError);
  CHECK_THROWS_AS(Expr::parse("x + z"), ExprError);
}

TEST_CASE("builtin charts hit their model curvature") {
  CHECK(ChartMetric::euclidean().curvature({0.4, -1.7}) == 0.0);
  CHECK(ChartMetric::euclidean().lambda({3, 5}) == 1.0);

  ChartMetric sph = ChartMetric::spherical(2.0);
  CHECK(sph.lambda({0, 0}) == doctest::Approx(2.0));
  for (Vec2 p : {Vec2{0, 0}, Vec2{0.5, 0.2}, Vec2{-1.1, 0.7}}) {
    CHECK(sph.curvature(p) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sph.curvature(p) == doctest::Approx(curvature_fd(sph, p)).epsilon(1e-6));
  }

  ChartMetric hyp = ChartMetric::hyperbolic(-1.0);
  for (Vec2 p : {Vec2{0, 0}, Vec2{0.3, -0.4}, Vec2{0.8, 0.1}})
    CHECK(hyp.curvature(p) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("validity regions") {
  ChartMetric hyp = ChartMetric::hyperbolic(-1.0);
  CHECK(hyp.valid({0.99, 0}));
  CHECK_FALSE(hyp.valid({1.0, 0.1}));
  CHECK_THROWS_AS(hyp.require_valid({2, 0}), ValidityError);
  try {
    hyp.require_valid({2, 0});
  } catch (const ValidityError& e) {
    CHECK(std::string(e.what()).find("hyperbolic") != std::string::npos);
  }

  ChartMetric sph = ChartMetric::spherical(1.0);
  CHECK(sph.valid({40, 0}));
  CHECK_FALSE(sph.valid({60, 0}));
}

TEST_CASE("custom chart matches the finite-difference curvature oracle") {
  ChartMetric c = ChartMetric::custom(Expr::parse("1 + x^2 + y^2"));
  for (Vec2 p : {Vec2{0, 0}, Vec2{0.4, 0.3}, Vec2{-0.9, 1.2}})
    CHECK(c.curvature(p) == doctest::Approx(curvature_fd(c, p)).epsilon(1e-6));
}

TEST_CASE("christoffels of a conformal metric") {
  // gamma^1_11 = px, gamma^1_12 = py, gamma^1_22 = -px, and the mirror
  // relations in the second slot, with p = log lambda
  ChartMetric c = ChartMetric::custom(Expr::parse("exp(x*y)"));
  Vec2 p{0.2, -0.5};
  MetricJet m = c.jet(p);
  Christoffels g = christoffels(m);
  const double px = m.grad_log.x, py = m.grad_log.y;
  CHECK(g.g[0][0][0] == doctest::Approx(px));
  CHECK(g.g[0][0][1] == doctest::Approx(py));
  CHECK(g.g[0][1][0] == doctest::Approx(py));
  CHECK(g.g[0][1][1] == doctest::Approx(-px));
  CHECK(g.g[1][0][0] == doctest::Approx(-py));
  CHECK(g.g[1][0][1] == doctest::Approx(px));
  CHECK(g.g[1][1][1] == doctest::Approx(py));

  const double h = 1e-6;
  CHECK(px == doctest::Approx((std::log(c.lambda({p.x + h, p.y})) -
                               std::log(c.lambda({p.x - h, p.y}))) /
                              (2 * h))
                  .epsilon(1e-7));
}

TEST_CASE("bump is exactly zero outside its support") {
  Bump b;
  b.center = {1, 0};
  b.radius = 0.5;
  b.amplitude = 0.05;
  CHECK_FALSE(b.covers({1.5, 0}));
  Jet2 outside = b.profile(1.6, 0.0);
  CHECK(outside.v == 0.0);
  CHECK(outside.dx == 0.0);
  CHECK(outside.dxx == 0.0);
  CHECK(b.profile(1.0, 0.0).v == doctest::Approx(1.0));

  ChartMetric c = ChartMetric::euclidean();
  ChartMetric cb = c;
  cb.set_bump(b);
  // untouched bit for bit outside the support
  CHECK(cb.lambda({2, 2}) == c.lambda({2, 2}));
  CHECK(cb.curvature({2, 2}) == c.curvature({2, 2}));
  // multiplicative inside
  CHECK(cb.lambda({1, 0}) == doctest::Approx(1.05));
  // the bumped curvature still matches the finite-difference oracle
  for (Vec2 p : {Vec2{1.1, 0.05}, Vec2{0.8, -0.1}})
    CHECK(cb.curvature(p) == doctest::Approx(curvature_fd(cb, p)).epsilon(1e-5));
}

TEST_CASE("field strength: constants, expressions, bumps, reversal") {
  FieldStrength f = FieldStrength::expression(Expr::parse("x + 2*y"));
  CHECK(f.value({1, 1}) == doctest::Approx(3.0));
  CHECK(f.grad({1, 1}).x == doctest::Approx(1.0));
  CHECK(f.grad({1, 1}).y == doctest::Approx(2.0));
  CHECK(f.negated().value({1, 1}) == doctest::Approx(-3.0));

  Bump b;
  b.center = {0, 0};
  b.radius = 1.0;
  b.amplitude = 0.2;
  FieldStrength g = FieldStrength::constant(1.0);
  g.set_bump(b);
  CHECK(g.value({0, 0}) == doctest::Approx(1.2));
  CHECK(g.value({2, 0}) == 1.0);
  // reversal flips the bump together with the base field
  CHECK(g.negated().value({0, 0}) == doctest::Approx(-1.2));

  MagneticSystem sys{ChartMetric::euclidean(), FieldStrength::constant(2.0)};
  Vec2 y = sys.lorentz({0, 0}, {1, 0});
  CHECK(y.x == 0.0);
  CHECK(y.y == doctest::Approx(2.0));
}
