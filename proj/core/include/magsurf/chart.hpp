#ifndef MAGSURF_CHART_HPP
#define MAGSURF_CHART_HPP

#include <optional>
#include <string>

#include "magsurf/expr.hpp"
#include "magsurf/jet.hpp"
#include "magsurf/types.hpp"

namespace magsurf {

// Smooth compactly supported multiplicative bump: the factor is
// 1 + amplitude * psi(|p - center| / radius) with psi the standard
// exponential bump, psi(0) = 1 and psi identically 0 outside the
// support disk. Outside the support the field is untouched bit for bit.
struct Bump {
  Vec2 center;
  double radius = 0.0;
  double amplitude = 0.0;

  bool covers(Vec2 p) const {
    Vec2 d = p - center;
    return dot(d, d) < radius * radius;
  }

  // Jet of psi at p (zero jet outside the support).
  Jet2 profile(double x, double y) const;
};

// Cached metric data at one chart point: conformal factor and the
// derivatives of log(lambda) that Christoffels and curvature need.
struct MetricJet {
  double lambda = 1.0;
  Vec2 grad_log;          // (d/dx, d/dy) of log lambda
  double hxx = 0.0;       // hessian of log lambda
  double hxy = 0.0;
  double hyy = 0.0;
};

// Christoffel symbols of a conformal metric, gamma[k][i][j] symmetric in (i,j).
struct Christoffels {
  double g[2][2][2] = {};
};

enum class ChartKind { euclidean, spherical, hyperbolic, custom };

std::string to_string(ChartKind k);

// A surface patch as a conformal metric g = lambda^2 (dx^2 + dy^2) on a
// single chart. Built-in models: euclidean (lambda = 1), the stereographic
// sphere of curvature K > 0 and the Poincare disk of curvature K < 0, both
// with lambda = 2 / (1 + K r^2). Custom charts supply lambda as an
// expression in x, y with analytic jet derivatives.
class ChartMetric {
 public:
  static ChartMetric euclidean();
  static ChartMetric spherical(double K);   // K > 0, valid |p| < chart_bound
  static ChartMetric hyperbolic(double K);  // K < 0, valid |p| < 1/sqrt(-K)
  static ChartMetric custom(Expr lambda, double validity_radius = 0.0);

  ChartKind kind() const { return kind_; }
  double nominal_curvature() const { return K_; }

  void set_bump(const Bump& b) { bump_ = b; }
  void clear_bump() { bump_.reset(); }
  const std::optional<Bump>& bump() const { return bump_; }

  // Spherical charts are formally valid on the whole plane minus the point
  // at infinity; the numerical validity region is a large disk.
  void set_validity_radius(double r) { validity_radius_ = r; }
  double validity_radius() const { return validity_radius_; }

  bool valid(Vec2 p) const;
  void require_valid(Vec2 p) const;  // throws ValidityError naming the kind

  MetricJet jet(Vec2 p) const;
  double lambda(Vec2 p) const { return jet(p).lambda; }

  // Gauss curvature K = -(laplacian of log lambda) / lambda^2.
  double curvature(Vec2 p) const;

  // g inner product / norm of tangent coordinate vectors at p.
  double inner(const MetricJet& m, Vec2 u, Vec2 v) const {
    return m.lambda * m.lambda * dot(u, v);
  }
  double gnorm(const MetricJet& m, Vec2 u) const {
    return m.lambda * norm(u);
  }
  double inner(Vec2 p, Vec2 u, Vec2 v) const { return inner(jet(p), u, v); }
  double gnorm(Vec2 p, Vec2 u) const { return gnorm(jet(p), u); }

 private:
  ChartKind kind_ = ChartKind::euclidean;
  double K_ = 0.0;
  Expr lambda_expr_;
  double validity_radius_ = 0.0;  // 0 means unbounded
  std::optional<Bump> bump_;

  Jet2 lambda_jet(double x, double y) const;
};

Christoffels christoffels(const MetricJet& m);

}  // namespace magsurf

#endif
