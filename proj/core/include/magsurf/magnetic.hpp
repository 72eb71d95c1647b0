#ifndef MAGSURF_MAGNETIC_HPP
#define MAGSURF_MAGNETIC_HPP

#include <optional>

#include "magsurf/chart.hpp"

namespace magsurf {

// Magnetic field strength b(x, y), so that Omega = b dA. Constant or an
// expression, with an optional additive compactly supported bump.
class FieldStrength {
 public:
  FieldStrength() = default;
  static FieldStrength constant(double c) {
    FieldStrength f;
    f.constant_ = c;
    return f;
  }
  static FieldStrength expression(Expr e) {
    FieldStrength f;
    f.expr_ = std::move(e);
    return f;
  }

  void set_bump(const Bump& b) { bump_ = b; }
  void clear_bump() { bump_.reset(); }
  const std::optional<Bump>& bump() const { return bump_; }

  Jet2 jet(Vec2 p) const {
    Jet2 b = expr_.empty() ? Jet2::constant(constant_) : expr_.eval(p.x, p.y);
    if (sign_ < 0) b = -b;
    if (bump_ && bump_->covers(p))
      b = b + sign_ * bump_->amplitude * bump_->profile(p.x, p.y);
    return b;
  }
  double value(Vec2 p) const { return jet(p).v; }
  Vec2 grad(Vec2 p) const {
    Jet2 b = jet(p);
    return {b.dx, b.dy};
  }

  FieldStrength negated() const {
    FieldStrength f = *this;
    f.sign_ = -f.sign_;
    return f;
  }
  int sign() const { return sign_; }

  // Crude upper bound for |b| near p, used only to pick integration steps.
  double magnitude_hint(Vec2 p) const {
    double m = std::abs(value(p));
    if (bump_) m += std::abs(bump_->amplitude);
    return m;
  }

 private:
  double constant_ = 0.0;
  Expr expr_;
  int sign_ = 1;
  std::optional<Bump> bump_;
};

// A chart plus a magnetic field strength. The Lorentz operator is
// Y(xi) = b(p) rot90(xi), skew with respect to g.
struct MagneticSystem {
  ChartMetric chart;
  FieldStrength field;

  double b(Vec2 p) const { return field.value(p); }

  Vec2 lorentz(Vec2 p, Vec2 xi) const {
    chart.require_valid(p);
    return field.value(p) * rot90(xi);
  }

  // Same chart, field negated. Magnetic geodesics of the reversed system
  // retrace those of the original with opposite orientation.
  MagneticSystem reversed() const { return {chart, field.negated()}; }
};

}  // namespace magsurf

#endif
