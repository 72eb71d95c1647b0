#include "magsurf/jacobi.hpp"

#include <algorithm>
#include <cmath>

namespace magsurf {

JacobiCoeffs jacobi_coeffs(const MagneticSystem& sys, const PhasePoint& p) {
  Jet2 bj = sys.field.jet(p.pos);
  const Vec2 db{bj.dx, bj.dy};
  const Vec2 e1 = p.vel;
  const Vec2 e2 = rot90(p.vel);
  return {bj.v, dot(db, e1), dot(db, e2), sys.chart.curvature(p.pos)};
}

namespace {

struct FullState {
  PhasePoint base;
  std::array<double, 4> f;  // f1, f2, g1, g2
};

std::array<double, 4> jacobi_rhs(const JacobiCoeffs& c,
                                 const std::array<double, 4>& f) {
  return {f[2], f[3],
          c.b * f[3] + c.db_e1 * f[1],
          -c.b * f[2] - (c.K - c.db_e2) * f[1]};
}

FullState full_rhs(const MagneticSystem& sys, const FullState& s) {
  FullState d;
  d.base = flow_rhs(sys, s.base);
  d.f = jacobi_rhs(jacobi_coeffs(sys, s.base), s.f);
  return d;
}

FullState axpy(const FullState& a, double s, const FullState& k) {
  FullState out;
  out.base.pos = a.base.pos + s * k.base.pos;
  out.base.vel = a.base.vel + s * k.base.vel;
  for (int i = 0; i < 4; ++i) out.f[i] = a.f[i] + s * k.f[i];
  return out;
}

FullState rk4_full(const MagneticSystem& sys, const FullState& s, double h) {
  FullState k1 = full_rhs(sys, s);
  FullState k2 = full_rhs(sys, axpy(s, 0.5 * h, k1));
  FullState k3 = full_rhs(sys, axpy(s, 0.5 * h, k2));
  FullState k4 = full_rhs(sys, axpy(s, h, k3));
  FullState out = s;
  out.base.pos = s.base.pos + (h / 6.0) * (k1.base.pos + 2.0 * k2.base.pos +
                                           2.0 * k3.base.pos + k4.base.pos);
  out.base.vel = s.base.vel + (h / 6.0) * (k1.base.vel + 2.0 * k2.base.vel +
                                           2.0 * k3.base.vel + k4.base.vel);
  for (int i = 0; i < 4; ++i)
    out.f[i] = s.f[i] + (h / 6.0) * (k1.f[i] + 2.0 * k2.f[i] + 2.0 * k3.f[i] + k4.f[i]);
  return out;
}

double hermite(double y0, double d0, double y1, double d1, double h, double u) {
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * d0 +
         (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * h * d1;
}

}  // namespace

size_t JacobiState::locate(double t) const {
  size_t k = static_cast<size_t>(t / step_);
  if (k >= t_.size() - 1) k = t_.size() - 2;
  while (k > 0 && t < t_[k]) --k;
  while (k + 2 < t_.size() && t > t_[k + 1]) ++k;
  return k;
}

std::array<double, 4> JacobiState::eval(double t) const {
  if (t <= t_.front()) return samples_.front().f;
  if (t >= t_.back()) return samples_.back().f;
  size_t k = locate(t);
  const double h = t_[k + 1] - t_[k];
  const double u = (t - t_[k]) / h;
  std::array<double, 4> out;
  for (int i = 0; i < 4; ++i)
    out[i] = hermite(samples_[k].f[i], samples_[k].fd[i], samples_[k + 1].f[i],
                     samples_[k + 1].fd[i], h, u);
  return out;
}

Vec2 JacobiState::J(double t) const {
  auto f = eval(t);
  size_t k = t >= t_.back() ? t_.size() - 1 : locate(t);
  // frame at t from the base samples (dense, renormalization-free is fine
  // at interpolation accuracy)
  PhasePoint p;
  if (t <= t_.front()) p = base_.front();
  else if (t >= t_.back()) p = base_.back();
  else {
    const double h = t_[k + 1] - t_[k];
    const double u = (t - t_[k]) / h;
    p.pos.x = hermite(base_[k].pos.x, base_[k].vel.x, base_[k + 1].pos.x, base_[k + 1].vel.x, h, u);
    p.pos.y = hermite(base_[k].pos.y, base_[k].vel.y, base_[k + 1].pos.y, base_[k + 1].vel.y, h, u);
    // velocity: linear blend is below Hermite accuracy for the frame; use
    // Hermite with stored accelerations absent -> fall back to samples
    p.vel = (1 - u) * base_[k].vel + u * base_[k + 1].vel;
  }
  AdaptedFrame fr = frame_of(p);
  return f[0] * fr.e1 + f[1] * fr.e2;
}

Vec2 JacobiState::Jprime(const MagneticSystem& sys, double t) const {
  auto f = eval(t);
  PhasePoint p = (t >= t_.back()) ? base_.back()
                                  : (t <= t_.front() ? base_.front() : PhasePoint{});
  if (t > t_.front() && t < t_.back()) {
    size_t k = locate(t);
    const double h = t_[k + 1] - t_[k];
    const double u = (t - t_[k]) / h;
    p.pos.x = hermite(base_[k].pos.x, base_[k].vel.x, base_[k + 1].pos.x, base_[k + 1].vel.x, h, u);
    p.pos.y = hermite(base_[k].pos.y, base_[k].vel.y, base_[k + 1].pos.y, base_[k + 1].vel.y, h, u);
    p.vel = (1 - u) * base_[k].vel + u * base_[k + 1].vel;
  }
  p = renormalize(sys, p);
  const double b = sys.b(p.pos);
  AdaptedFrame fr = frame_of(p);
  return (f[2] - b * f[1]) * fr.e1 + (f[3] + b * f[0]) * fr.e2;
}

double JacobiState::jprime_dot_gamma(double t) const {
  auto f = eval(t);
  // <J', gamma'> = f1' - b f2 in frame components
  double b;
  if (t <= t_.front()) b = b_.front();
  else if (t >= t_.back()) b = b_.back();
  else {
    size_t k = locate(t);
    const double u = (t - t_[k]) / (t_[k + 1] - t_[k]);
    b = (1 - u) * b_[k] + u * b_[k + 1];
  }
  return f[2] - b * f[1];
}

JacobiState propagate_jacobi(const MagneticSystem& sys, const Trajectory& traj,
                             Vec2 J0, Vec2 J0p) {
  const PhasePoint start = traj.start();
  MetricJet m = sys.chart.jet(start.pos);
  AdaptedFrame fr = frame_of(start);
  const double ip = sys.chart.inner(m, J0p, fr.e1);
  const double scale = std::max(1.0, sys.chart.gnorm(m, J0p));
  if (std::abs(ip) > 1e-9 * scale)
    throw ContractError("propagate_jacobi: <J0', gamma'(0)> = " +
                        std::to_string(ip) + ", must vanish");

  const double b0 = sys.b(start.pos);
  std::array<double, 4> f;
  f[0] = sys.chart.inner(m, J0, fr.e1);
  f[1] = sys.chart.inner(m, J0, fr.e2);
  f[2] = ip + b0 * f[1];
  f[3] = sys.chart.inner(m, J0p, fr.e2) - b0 * f[0];

  JacobiState st;
  const auto& ts = traj.times();
  st.t_ = ts;
  st.step_ = traj.step();
  st.samples_.reserve(ts.size());
  st.base_.reserve(ts.size());
  st.b_.reserve(ts.size());

  FullState cur{start, f};
  auto record = [&](const FullState& s) {
    JacobiState::Sample smp;
    smp.f = s.f;
    smp.fd = jacobi_rhs(jacobi_coeffs(sys, s.base), s.f);
    st.samples_.push_back(smp);
    st.base_.push_back(s.base);
    st.b_.push_back(sys.b(s.base.pos));
  };
  record(cur);
  for (size_t i = 0; i + 1 < ts.size(); ++i) {
    cur = rk4_full(sys, cur, ts[i + 1] - ts[i]);
    cur.base = renormalize(sys, cur.base);
    record(cur);
  }
  return st;
}

double variational_consistency(const MagneticSystem& sys, Vec2 x, Vec2 xi,
                               Vec2 v, double t, double h,
                               const StepControl& ctrl) {
  if (h <= 0) throw ContractError("variational_consistency: h must be > 0");
  MetricJet m = sys.chart.jet(x);
  if (std::abs(sys.chart.gnorm(m, v) - 1.0) > 1e-8)
    throw ContractError("variational_consistency: |v|_g must be 1");
  if (std::abs(sys.chart.inner(m, v, xi)) > 1e-8)
    throw ContractError("variational_consistency: v must be perpendicular to xi");
  if (t == 0) return 0.0;

  // Rotation rate that realizes xi'(0) = v.
  const double c = sys.chart.inner(m, v, rot90(xi));
  auto rotated = [&](double s) {
    return std::cos(c * s) * xi + std::sin(c * s) * rot90(xi);
  };
  Vec2 plus = magnetic_exp(sys, x, rotated(h), t, ctrl);
  Vec2 minus = magnetic_exp(sys, x, rotated(-h), t, ctrl);
  Vec2 fd = (plus - minus) / (2.0 * h);

  Trajectory traj = integrate(sys, {x, xi}, t, ctrl);
  JacobiState J = propagate_jacobi(sys, traj, {0, 0}, v);
  Vec2 Jt = J.J(t);

  MetricJet me = sys.chart.jet(traj.end().pos);
  const double scale = std::max(sys.chart.gnorm(me, Jt), 1e-30);
  return sys.chart.gnorm(me, fd - Jt) / scale;
}

double symplectic_pairing(const JacobiState& Jv, const JacobiState& Jw,
                          const MagneticSystem& sys, const Trajectory& traj,
                          double t) {
  const PhasePoint a = Jv.base_start();
  const PhasePoint b = Jw.base_start();
  const PhasePoint c = traj.start();
  auto same = [](const PhasePoint& p, const PhasePoint& q) {
    return norm(p.pos - q.pos) < 1e-12 && norm(p.vel - q.vel) < 1e-12;
  };
  if (!same(a, c) || !same(b, c) ||
      std::abs(Jv.duration() - Jw.duration()) > 1e-12)
    throw ContractError("symplectic_pairing: states propagated along different trajectories");

  auto fv = Jv.eval(t);
  auto fw = Jw.eval(t);
  const double bb = sys.b(traj.eval(t).pos);
  const double v1 = fv[0], v2 = fv[1];
  const double w1 = fw[0], w2 = fw[1];
  const double v1p = fv[2] - bb * fv[1], v2p = fv[3] + bb * fv[0];
  const double w1p = fw[2] - bb * fw[1], w2p = fw[3] + bb * fw[0];
  // <Jv, Jw'> - <Jv', Jw> + <Y(Jv), Jw>
  return v1 * w1p + v2 * w2p - (v1p * w1 + v2p * w2) +
         bb * (v1 * w2 - v2 * w1);
}

std::optional<ConjugatePoint> first_conjugate(const MagneticSystem& sys, Vec2 x,
                                              Vec2 xi, double Tmax,
                                              const StepControl& ctrl) {
  if (Tmax <= 0) throw ContractError("first_conjugate: Tmax must be > 0");
  PhasePoint start = renormalize(sys, {x, xi});
  Trajectory traj = integrate(sys, start, Tmax, ctrl);
  Vec2 e2 = rot90(start.vel);
  // e2 has unit g-norm since the start velocity does
  JacobiState J = propagate_jacobi(sys, traj, {0, 0}, e2);

  const auto& ts = J.times();
  const auto& ss = J.samples();
  // f2 ~ t near 0; skip the initial node.
  for (size_t i = 1; i < ts.size(); ++i) {
    const double f2_prev = ss[i - 1].f[1];
    const double f2 = ss[i].f[1];
    if (i >= 2 && ((f2_prev > 0 && f2 <= 0) || (f2_prev < 0 && f2 >= 0))) {
      // bisect on the dense output
      double lo = ts[i - 1], hi = ts[i];
      double flo = f2_prev;
      while (hi - lo > 1e-9) {
        double mid = 0.5 * (lo + hi);
        double fm = J.eval(mid)[1];
        if ((flo > 0 && fm <= 0) || (flo < 0 && fm >= 0)) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      return ConjugatePoint{0.5 * (lo + hi), 1, false};
    }
    // tangential (even-order) contact: a dip below 1e-12 without sign change
    if (i >= 2 && i + 1 < ts.size()) {
      const double f2_next = ss[i + 1].f[1];
      if (std::abs(f2) < 1e-12 && std::abs(f2) <= std::abs(f2_prev) &&
          std::abs(f2) <= std::abs(f2_next) && f2_prev * f2_next > 0)
        return ConjugatePoint{ts[i], 1, true};
    }
  }
  return std::nullopt;
}

}  // namespace magsurf
