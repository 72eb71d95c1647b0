#include "magsurf/chart.hpp"

#include <cmath>

namespace magsurf {

Jet2 Bump::profile(double x, double y) const {
  const double ux = (x - center.x) / radius;
  const double uy = (y - center.y) / radius;
  if (ux * ux + uy * uy >= 1.0) return Jet2{};
  Jet2 sx = (Jet2::var_x(x) - center.x) / radius;
  Jet2 sy = (Jet2::var_y(y) - center.y) / radius;
  Jet2 s2 = sx * sx + sy * sy;
  return exp(1.0 - inv(1.0 - s2));
}

std::string to_string(ChartKind k) {
  switch (k) {
    case ChartKind::euclidean: return "euclidean";
    case ChartKind::spherical: return "spherical";
    case ChartKind::hyperbolic: return "hyperbolic";
    case ChartKind::custom: return "custom";
  }
  return "?";
}

ChartMetric ChartMetric::euclidean() { return ChartMetric{}; }

ChartMetric ChartMetric::spherical(double K) {
  if (K <= 0) throw ContractError("spherical chart needs K > 0");
  ChartMetric c;
  c.kind_ = ChartKind::spherical;
  c.K_ = K;
  c.validity_radius_ = 50.0 / std::sqrt(K);
  return c;
}

ChartMetric ChartMetric::hyperbolic(double K) {
  if (K >= 0) throw ContractError("hyperbolic chart needs K < 0");
  ChartMetric c;
  c.kind_ = ChartKind::hyperbolic;
  c.K_ = K;
  c.validity_radius_ = 1.0 / std::sqrt(-K);
  return c;
}

ChartMetric ChartMetric::custom(Expr lambda, double validity_radius) {
  ChartMetric c;
  c.kind_ = ChartKind::custom;
  c.lambda_expr_ = std::move(lambda);
  c.validity_radius_ = validity_radius;
  return c;
}

bool ChartMetric::valid(Vec2 p) const {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  if (validity_radius_ <= 0.0) return true;
  return dot(p, p) < validity_radius_ * validity_radius_;
}

void ChartMetric::require_valid(Vec2 p) const {
  if (!valid(p))
    throw ValidityError("point (" + std::to_string(p.x) + ", " +
                            std::to_string(p.y) +
                            ") outside validity region of " + to_string(kind_) +
                            " chart",
                        p, 0.0);
}

Jet2 ChartMetric::lambda_jet(double x, double y) const {
  Jet2 base;
  switch (kind_) {
    case ChartKind::euclidean:
      base = Jet2::constant(1.0);
      break;
    case ChartKind::spherical:
    case ChartKind::hyperbolic: {
      Jet2 jx = Jet2::var_x(x), jy = Jet2::var_y(y);
      base = 2.0 / (1.0 + K_ * (jx * jx + jy * jy));
      break;
    }
    case ChartKind::custom:
      base = lambda_expr_.eval(x, y);
      break;
  }
  if (bump_ && bump_->covers({x, y}))
    base = base * (1.0 + bump_->amplitude * bump_->profile(x, y));
  return base;
}

MetricJet ChartMetric::jet(Vec2 p) const {
  require_valid(p);
  Jet2 l = lambda_jet(p.x, p.y);
  if (!(l.v > 0.0))
    throw ValidityError("conformal factor not positive at (" +
                            std::to_string(p.x) + ", " + std::to_string(p.y) +
                            ") on " + to_string(kind_) + " chart",
                        p, 0.0);
  MetricJet m;
  m.lambda = l.v;
  const double il = 1.0 / l.v;
  m.grad_log = {l.dx * il, l.dy * il};
  // hessian of log lambda = (lambda * lambda_ij - lambda_i lambda_j) / lambda^2
  m.hxx = (l.v * l.dxx - l.dx * l.dx) * il * il;
  m.hxy = (l.v * l.dxy - l.dx * l.dy) * il * il;
  m.hyy = (l.v * l.dyy - l.dy * l.dy) * il * il;
  return m;
}

double ChartMetric::curvature(Vec2 p) const {
  MetricJet m = jet(p);
  return -(m.hxx + m.hyy) / (m.lambda * m.lambda);
}

Christoffels christoffels(const MetricJet& m) {
  const double px = m.grad_log.x, py = m.grad_log.y;
  Christoffels c;
  c.g[0][0][0] = px;
  c.g[0][0][1] = py;
  c.g[0][1][0] = py;
  c.g[0][1][1] = -px;
  c.g[1][0][0] = -py;
  c.g[1][0][1] = px;
  c.g[1][1][0] = px;
  c.g[1][1][1] = py;
  return c;
}

}  // namespace magsurf
