#include "magsurf/flow.hpp"

#include <algorithm>
#include <cmath>

namespace magsurf {

double default_step(const MagneticSystem& sys, const PhasePoint& start,
                    const StepControl& ctrl) {
  double scale = 1.0;
  const double bmax = sys.field.magnitude_hint(start.pos);
  if (bmax > 1.0) scale = std::min(scale, 1.0 / bmax);
  double K = sys.chart.kind() == ChartKind::custom
                 ? sys.chart.curvature(start.pos)
                 : sys.chart.nominal_curvature();
  if (std::abs(K) > 1.0) scale = std::min(scale, 1.0 / std::sqrt(std::abs(K)));
  return ctrl.step_scale * scale;
}

PhasePoint flow_rhs(const MagneticSystem& sys, const PhasePoint& state) {
  MetricJet m = sys.chart.jet(state.pos);
  Christoffels c = christoffels(m);
  const Vec2 v = state.vel;
  const double vv[2] = {v.x, v.y};
  double acc[2];
  for (int k = 0; k < 2; ++k) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s += c.g[k][i][j] * vv[i] * vv[j];
    acc[k] = -s;
  }
  const Vec2 y = sys.field.value(state.pos) * rot90(v);
  return {{v.x, v.y}, {acc[0] + y.x, acc[1] + y.y}};
}

PhasePoint rk4_step(const MagneticSystem& sys, const PhasePoint& state,
                    double h) {
  auto add = [](const PhasePoint& a, double s, const PhasePoint& k) {
    return PhasePoint{a.pos + s * k.pos, a.vel + s * k.vel};
  };
  PhasePoint k1 = flow_rhs(sys, state);
  PhasePoint k2 = flow_rhs(sys, add(state, 0.5 * h, k1));
  PhasePoint k3 = flow_rhs(sys, add(state, 0.5 * h, k2));
  PhasePoint k4 = flow_rhs(sys, add(state, h, k3));
  PhasePoint out = state;
  out.pos = state.pos + (h / 6.0) * (k1.pos + 2.0 * k2.pos + 2.0 * k3.pos + k4.pos);
  out.vel = state.vel + (h / 6.0) * (k1.vel + 2.0 * k2.vel + 2.0 * k3.vel + k4.vel);
  return out;
}

PhasePoint renormalize(const MagneticSystem& sys, PhasePoint p) {
  const double n = sys.chart.gnorm(p.pos, p.vel);
  p.vel = p.vel / n;
  return p;
}

size_t Trajectory::locate(double t) const {
  if (t_.size() < 2) return 0;
  // Uniform grid except possibly the last step.
  size_t k = static_cast<size_t>(t / step_);
  if (k >= t_.size() - 1) k = t_.size() - 2;
  while (k > 0 && t < t_[k]) --k;
  while (k + 2 < t_.size() && t > t_[k + 1]) ++k;
  return k;
}

static double hermite(double y0, double d0, double y1, double d1, double h,
                      double u) {
  // u in [0,1] on an interval of width h
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * d0 +
         (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * h * d1;
}

PhasePoint Trajectory::eval(double t) const {
  if (t_.empty()) throw ContractError("empty trajectory");
  if (t <= t_.front()) return s_.front();
  if (t >= t_.back()) return s_.back();
  size_t k = locate(t);
  const double h = t_[k + 1] - t_[k];
  const double u = (t - t_[k]) / h;
  if (u == 0.0) return s_[k];
  PhasePoint out;
  out.pos.x = hermite(s_[k].pos.x, d_[k].pos.x, s_[k + 1].pos.x, d_[k + 1].pos.x, h, u);
  out.pos.y = hermite(s_[k].pos.y, d_[k].pos.y, s_[k + 1].pos.y, d_[k + 1].pos.y, h, u);
  out.vel.x = hermite(s_[k].vel.x, d_[k].vel.x, s_[k + 1].vel.x, d_[k + 1].vel.x, h, u);
  out.vel.y = hermite(s_[k].vel.y, d_[k].vel.y, s_[k + 1].vel.y, d_[k + 1].vel.y, h, u);
  return out;
}

PhasePoint Trajectory::eval_unit(const MagneticSystem& sys, double t) const {
  return renormalize(sys, eval(t));
}

Trajectory integrate(const MagneticSystem& sys, PhasePoint start, double T,
                     const StepControl& ctrl) {
  if (T < 0) throw ContractError("integrate: negative duration");
  start = renormalize(sys, start);

  Trajectory traj;
  const double h0 = default_step(sys, start, ctrl);
  size_t n = std::max<size_t>(1, static_cast<size_t>(std::ceil(T / h0)));
  const double h = T > 0 ? T / static_cast<double>(n) : h0;
  traj.step_ = h;
  traj.t_.reserve(n + 1);
  traj.s_.reserve(n + 1);
  traj.d_.reserve(n + 1);

  PhasePoint cur = start;
  traj.t_.push_back(0.0);
  traj.s_.push_back(cur);
  traj.d_.push_back(flow_rhs(sys, cur));
  if (T == 0) return traj;

  for (size_t i = 0; i < n; ++i) {
    const double t_next = (i + 1 == n) ? T : (i + 1) * h;
    PhasePoint next;
    try {
      if (!ctrl.adaptive) {
        next = rk4_step(sys, cur, h);
      } else {
        // Step doubling: accept the halved solution, refine if needed.
        double hh = h;
        for (;;) {
          PhasePoint full = rk4_step(sys, cur, hh);
          PhasePoint half = rk4_step(sys, rk4_step(sys, cur, 0.5 * hh), 0.5 * hh);
          const double err = norm(full.pos - half.pos) + norm(full.vel - half.vel);
          if (err <= ctrl.adaptive_tol || hh <= ctrl.min_step) {
            // Substep to land exactly on the grid node.
            if (hh < h) {
              PhasePoint p = cur;
              double remaining = h;
              while (remaining > 1e-15) {
                double s = std::min(hh, remaining);
                p = renormalize(sys, rk4_step(sys, p, s));
                remaining -= s;
              }
              next = p;
            } else {
              next = half;
            }
            break;
          }
          hh *= 0.5;
          if (hh < ctrl.min_step)
            throw StiffnessError("step underflow at t=" + std::to_string(i * h));
        }
      }
    } catch (const ValidityError&) {
      throw ValidityError("trajectory left the validity region of the " +
                              to_string(sys.chart.kind()) + " chart",
                          cur.pos, i * h);
    }
    if (!sys.chart.valid(next.pos))
      throw ValidityError("trajectory left the validity region of the " +
                              to_string(sys.chart.kind()) + " chart",
                          cur.pos, i * h);
    const double drift = std::abs(sys.chart.gnorm(next.pos, next.vel) - 1.0);
    traj.total_drift_ += drift;
    traj.max_step_drift_ = std::max(traj.max_step_drift_, drift);
    if (drift > ctrl.unit_speed_tol) ++traj.renorm_count_;
    next = renormalize(sys, next);
    traj.t_.push_back(t_next);
    traj.s_.push_back(next);
    traj.d_.push_back(flow_rhs(sys, next));
    cur = next;
  }
  return traj;
}

Vec2 magnetic_exp(const MagneticSystem& sys, Vec2 x, Vec2 xi, double t,
                  const StepControl& ctrl) {
  if (t < 0) throw ContractError("magnetic_exp: t must be >= 0");
  if (t == 0) {
    sys.chart.require_valid(x);
    return x;
  }
  return integrate(sys, {x, xi}, t, ctrl).end().pos;
}

}  // namespace magsurf
