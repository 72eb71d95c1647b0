#include "magsurf/closure.hpp"

#include <algorithm>
#include <cmath>

#include "magsurf/parallel.hpp"

namespace magsurf {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string to_string(OrbitStatus s) {
  return s == OrbitStatus::closed ? "closed" : "open";
}

double phase_dist(PhasePoint a, PhasePoint b, const PhaseWeights& w) {
  const double dp = norm(a.pos - b.pos);
  // coordinate angle equals metric angle in a conformal chart
  const double cr = a.vel.x * b.vel.y - a.vel.y * b.vel.x;
  const double dt = dot(a.vel, b.vel);
  const double ang = std::abs(std::atan2(cr, dt));
  return w.position * dp + w.angle * ang;
}

OrbitRecord closure_gap(const MagneticSystem& sys, PhasePoint start,
                        double Tmax, const StepControl& ctrl,
                        const PhaseWeights& w) {
  if (Tmax <= 0) throw ContractError("closure_gap: Tmax must be > 0");
  start = renormalize(sys, start);
  Trajectory traj = integrate(sys, start, Tmax, ctrl);

  const auto& ts = traj.times();
  const auto& ss = traj.samples();
  std::vector<double> d(ts.size());
  double dmax = 0.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    d[i] = phase_dist(ss[i], start, w);
    dmax = std::max(dmax, d[i]);
  }

  OrbitRecord rec;
  rec.initial = start;
  rec.period = Tmax;
  rec.closure_gap = dmax;
  rec.status = OrbitStatus::open;

  // the orbit must first leave the start before a return can be meaningful
  const double d_leave = 0.25 * dmax;
  size_t i_far = 0;
  while (i_far < d.size() && d[i_far] < d_leave) ++i_far;
  if (i_far == 0 || i_far >= d.size()) return rec;

  // first local minimum below the leave level after the orbit got far
  size_t i_min = 0;
  for (size_t i = i_far + 1; i + 1 < d.size(); ++i) {
    if (d[i] <= d[i - 1] && d[i] <= d[i + 1] && d[i] < d_leave) {
      i_min = i;
      break;
    }
  }
  if (i_min == 0) return rec;

  auto f = [&](double t) {
    PhasePoint p = traj.eval_unit(sys, t);
    return phase_dist(p, start, w);
  };
  // golden-section refinement on the bracketing nodes
  const double gr = 0.6180339887498949;
  double a = ts[i_min - 1], b = ts[i_min + 1];
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > 1e-12) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  rec.period = 0.5 * (a + b);
  rec.closure_gap = f(rec.period);
  rec.status = rec.closure_gap <= kClosureTol ? OrbitStatus::closed
                                              : OrbitStatus::open;
  return rec;
}

int pass_count(const MagneticSystem& sys, PhasePoint start,
               const DomainSpec& dom, double Tstar, const StepControl& ctrl) {
  if (Tstar <= 0) throw ContractError("pass_count: T* must be > 0");
  start = renormalize(sys, start);
  Trajectory traj = integrate(sys, start, Tstar, ctrl);

  const int subs = 4;
  std::vector<bool> in;
  std::vector<double> tgrid;
  double fmin = 1e300, tmin = 0.0;
  const auto& ts = traj.times();
  for (size_t i = 0; i + 1 < ts.size(); ++i) {
    for (int k = 0; k < subs; ++k) {
      const double t = ts[i] + (ts[i + 1] - ts[i]) * k / subs;
      // exclude t >= T* so the count lives on [0, T*)
      if (t >= Tstar) break;
      const double F = dom.signed_dist(traj.eval(t).pos);
      if (F < fmin) {
        fmin = F;
        tmin = t;
      }
      in.push_back(F < 0.0);
      tgrid.push_back(t);
    }
  }
  if (in.empty()) return 0;

  int m = 0;
  for (size_t i = 0; i < in.size(); ++i) {
    const bool prev = i == 0 ? false : in[i - 1];
    if (in[i] && !prev) ++m;
  }
  // periodic identification: an interval straddling t = 0 was counted twice
  if (in.front() && in.back()) --m;
  if (m == 0 && fmin < 1e-3) {
    // refine the closest approach; a true tangency reaches 0 up to
    // integration error, a near miss stays quadratically away
    const double dtg = tgrid.size() > 1 ? tgrid[1] - tgrid[0] : Tstar;
    double a = std::max(0.0, tmin - dtg), b = std::min(Tstar, tmin + dtg);
    auto f = [&](double t) { return dom.signed_dist(traj.eval(t).pos); };
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > 1e-11) {
      if (f1 < f2) {
        b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = f(x1);
      } else {
        a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = f(x2);
      }
    }
    if (f(0.5 * (a + b)) < 1e-8) return 1;  // tangential touch
  }
  return m;
}

CensusReport closure_census(const MagneticSystem& sys, const Domain& dom,
                            int n_boundary, int n_angle, double Tmax,
                            const MagneticSystem* baseline,
                            const StepControl& ctrl, int threads) {
  if (n_boundary < 1 || n_angle < 1)
    throw ContractError("closure_census: grid must be at least 1x1");
  if (Tmax <= 0) Tmax = default_tmax(sys, dom);

  const double L = dom.length();
  CensusReport rep;
  rep.orbits = n_boundary * n_angle;
  rep.records.resize(static_cast<size_t>(rep.orbits));

  parallel_for(rep.records.size(), threads, [&](size_t idx) {
    const int i = static_cast<int>(idx) / n_angle;
    const int j = static_cast<int>(idx) % n_angle;
    const double s = L * i / n_boundary;
    const double theta = kPi * (j + 1) / (n_angle + 1);
    Vec2 p = dom.point(s);
    Vec2 xi =
        std::cos(theta) * dom.tangent(s) + std::sin(theta) * dom.inward_normal(s);
    OrbitRecord rec = closure_gap(sys, {p, xi}, Tmax, ctrl);
    rec.pass_count = pass_count(sys, rec.initial, dom.spec(),
                                rec.status == OrbitStatus::closed ? rec.period
                                                                  : Tmax,
                                ctrl);
    rep.records[idx] = rec;
  });

  for (const auto& r : rep.records) {
    if (r.status == OrbitStatus::closed) ++rep.closed;
    if (r.closure_gap > rep.worst_gap) {
      rep.worst_gap = r.closure_gap;
      rep.worst_start = r.initial;
    }
    ++rep.m_histogram[r.pass_count];
  }
  rep.fraction_closed = double(rep.closed) / rep.orbits;

  if (baseline) {
    auto ta = scattering_table(sys, dom, n_boundary, n_angle, 0.0, ctrl, threads);
    auto tb =
        scattering_table(*baseline, dom, n_boundary, n_angle, 0.0, ctrl, threads);
    rep.scatter_sups = compare_scattering(ta, tb, L);
  }
  return rep;
}

}  // namespace magsurf
