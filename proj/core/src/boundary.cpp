#include "magsurf/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "magsurf/parallel.hpp"

namespace magsurf {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
constexpr double kGrazeTol = 1e-6;
constexpr double kEventTimeTol = 1e-10;
}  // namespace

DomainSpec DomainSpec::circle(Vec2 center, double radius) {
  if (radius <= 0) throw ContractError("circle domain needs radius > 0");
  DomainSpec d;
  d.is_circle = true;
  d.center = center;
  d.radius = radius;
  return d;
}

DomainSpec DomainSpec::parametric(std::function<Vec2(double)> point,
                                  std::function<Vec2(double)> d1,
                                  std::function<Vec2(double)> d2, double period,
                                  std::function<bool(Vec2)> inside) {
  if (period <= 0) throw ContractError("parametric domain needs period > 0");
  DomainSpec d;
  d.is_circle = false;
  d.point = std::move(point);
  d.d1 = std::move(d1);
  d.d2 = std::move(d2);
  d.period = period;
  d.inside_fn = std::move(inside);
  return d;
}

Vec2 DomainSpec::point_at(double q) const {
  if (is_circle) return center + radius * Vec2{std::cos(q), std::sin(q)};
  return point(q);
}

Vec2 DomainSpec::deriv_at(double q) const {
  if (is_circle) return radius * Vec2{-std::sin(q), std::cos(q)};
  return d1(q);
}

Vec2 DomainSpec::second_at(double q) const {
  if (is_circle) return radius * Vec2{-std::cos(q), -std::sin(q)};
  return d2(q);
}

double DomainSpec::signed_dist(Vec2 p) const {
  if (is_circle) return norm(p - center) - radius;
  // closest point on the curve, Newton refined from a coarse scan
  const int n = 256;
  double best_q = 0.0, best_d2 = 1e300;
  for (int i = 0; i < n; ++i) {
    const double q = period * i / n;
    Vec2 d = p - point(q);
    const double dd = dot(d, d);
    if (dd < best_d2) {
      best_d2 = dd;
      best_q = q;
    }
  }
  double q = best_q;
  for (int it = 0; it < 30; ++it) {
    Vec2 c = point(q), cp = d1(q), cpp = d2(q);
    Vec2 r = p - c;
    const double f = dot(r, cp);                 // stationarity of |r|^2
    const double fp = dot(r, cpp) - dot(cp, cp);
    if (std::abs(fp) < 1e-300) break;
    const double step = f / fp;
    q -= step;
    if (std::abs(step) < 1e-14) break;
  }
  const double dist = norm(p - point(q));
  const bool in = inside_fn ? inside_fn(p) : false;
  return in ? -dist : dist;
}

double DomainSpec::param_of_point(Vec2 p) const {
  if (is_circle) {
    double q = std::atan2(p.y - center.y, p.x - center.x);
    if (q < 0) q += kTwoPi;
    return q;
  }
  const int n = 512;
  double best_q = 0.0, best_d2 = 1e300;
  for (int i = 0; i < n; ++i) {
    const double q = period * i / n;
    Vec2 d = p - point(q);
    const double dd = dot(d, d);
    if (dd < best_d2) {
      best_d2 = dd;
      best_q = q;
    }
  }
  double q = best_q;
  for (int it = 0; it < 30; ++it) {
    Vec2 c = point(q), cp = d1(q), cpp = d2(q);
    Vec2 r = p - c;
    const double fp = dot(r, cpp) - dot(cp, cp);
    if (std::abs(fp) < 1e-300) break;
    const double step = dot(r, cp) / fp;
    q -= step;
    if (std::abs(step) < 1e-14) break;
  }
  q = std::fmod(q, period);
  if (q < 0) q += period;
  return q;
}

Domain::Domain(const ChartMetric& chart, DomainSpec spec, int table_size)
    : chart_(chart), spec_(std::move(spec)) {
  const double P = spec_.param_period();
  // cumulative g-length by per-interval 4-point Gauss
  static const double gx[] = {-0.8611363115940526, -0.3399810435848563,
                              0.3399810435848563, 0.8611363115940526};
  static const double gw[] = {0.3478548451374538, 0.6521451548625461,
                              0.6521451548625461, 0.3478548451374538};
  cum_.resize(table_size + 1);
  cum_[0] = 0.0;
  const double hq = P / table_size;
  for (int i = 0; i < table_size; ++i) {
    const double mid = (i + 0.5) * hq;
    double seg = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double q = mid + 0.5 * hq * gx[k];
      Vec2 c = spec_.point_at(q);
      seg += gw[k] * chart_.lambda(c) * norm(spec_.deriv_at(q));
    }
    cum_[i + 1] = cum_[i] + seg * 0.5 * hq;
  }
  total_len_ = cum_.back();
  if (total_len_ <= 0) throw ContractError("degenerate boundary curve");

  // orientation: does rot90(tangent) point inward?
  Vec2 p0 = spec_.point_at(0.0);
  Vec2 t0 = spec_.deriv_at(0.0);
  Vec2 n0 = rot90(t0) / norm(t0);
  const double eps = 1e-6 * std::max(1.0, total_len_);
  orient_ = spec_.inside(p0 + eps * n0) ? 1 : -1;
  if (!spec_.inside(p0 + eps * static_cast<double>(orient_) * n0))
    throw ContractError("inward normal check failed on the boundary curve");
}

double Domain::arclen_of_param(double q) const {
  const double P = spec_.param_period();
  q = std::fmod(q, P);
  if (q < 0) q += P;
  const int n = static_cast<int>(cum_.size()) - 1;
  const double x = q / P * n;
  const int k = std::min(n - 1, static_cast<int>(x));
  const double u = x - k;
  return (1 - u) * cum_[k] + u * cum_[k + 1];
}

double Domain::param_of_arclen(double s) const {
  const double P = spec_.param_period();
  s = std::fmod(s, total_len_);
  if (s < 0) s += total_len_;
  const int n = static_cast<int>(cum_.size()) - 1;
  // binary search in the monotone table
  int lo = 0, hi = n;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (cum_[mid] <= s) lo = mid;
    else hi = mid;
  }
  const double u = (s - cum_[lo]) / (cum_[lo + 1] - cum_[lo]);
  return (lo + u) * P / n;
}

Vec2 Domain::tangent(double s) const {
  const double q = param_of_arclen(s);
  Vec2 d = spec_.deriv_at(q);
  Vec2 p = spec_.point_at(q);
  return d / (chart_.lambda(p) * norm(d));
}

Vec2 Domain::inward_normal(double s) const {
  return static_cast<double>(orient_) * rot90(tangent(s));
}

double Domain::kappa(double s) const {
  const double q = param_of_arclen(s);
  Vec2 p = spec_.point_at(q);
  Vec2 cp = spec_.deriv_at(q);
  Vec2 cpp = spec_.second_at(q);
  MetricJet m = chart_.jet(p);
  Christoffels g = christoffels(m);
  const double v[2] = {cp.x, cp.y};
  double acc[2] = {cpp.x, cpp.y};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) acc[k] += g.g[k][i][j] * v[i] * v[j];
  Vec2 nabla{acc[0], acc[1]};
  Vec2 nu = inward_normal(s);
  const double speed2 = chart_.inner(m, cp, cp);
  return chart_.inner(m, nabla, nu) / speed2;
}

double Domain::kappa_fd(double s, double h) const {
  const double q = param_of_arclen(s);
  auto angle = [&](double qq) {
    Vec2 d = spec_.deriv_at(qq);
    return std::atan2(d.y, d.x);
  };
  double a_plus = angle(q + h), a_minus = angle(q - h), a0 = angle(q);
  // unwrap
  while (a_plus - a0 > 3.2) a_plus -= kTwoPi;
  while (a_plus - a0 < -3.2) a_plus += kTwoPi;
  while (a_minus - a0 > 3.2) a_minus -= kTwoPi;
  while (a_minus - a0 < -3.2) a_minus += kTwoPi;
  Vec2 p = spec_.point_at(q);
  Vec2 cp = spec_.deriv_at(q);
  const double ke = (a_plus - a_minus) / (2 * h) / norm(cp) * orient_;
  MetricJet m = chart_.jet(p);
  Vec2 n_in = static_cast<double>(orient_) * rot90(cp) / norm(cp);
  const double dphi = dot(m.grad_log, n_in);
  return (ke - dphi) / m.lambda;
}

std::string to_string(ExitStatus s) {
  switch (s) {
    case ExitStatus::exited: return "exited";
    case ExitStatus::grazing: return "grazing";
    case ExitStatus::trapped: return "trapped";
  }
  return "?";
}

double default_tmax(const MagneticSystem& sys, const Domain& dom) {
  const Vec2 p = dom.point(0.0);
  const double b = sys.field.magnitude_hint(p);
  const double orbit_scale = b > 1e-9 ? kTwoPi / b : 0.0;
  return 50.0 * (dom.length() + orbit_scale);
}

namespace {

// First t in (0, Tmax] with signed_dist > 0, from a state on or inside the
// boundary. Returns nullopt when no crossing is found before Tmax.
std::optional<std::pair<double, PhasePoint>> find_crossing(
    const MagneticSystem& sys, const Domain& dom, PhasePoint start, double Tmax,
    const StepControl& ctrl) {
  const double h = default_step(sys, start, ctrl);
  const int subs = 8;
  PhasePoint cur = renormalize(sys, start);
  double t_cur = 0.0;
  double f_prev = dom.signed_dist(cur.pos);
  double t_prev = 0.0;
  PhasePoint state_prev = cur;

  auto hermite_between = [](const PhasePoint& a, const PhasePoint& da,
                            const PhasePoint& b, const PhasePoint& db, double hh,
                            double u) {
    auto H = [&](double y0, double d0, double y1, double d1) {
      const double u2 = u * u, u3 = u2 * u;
      return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * hh * d0 +
             (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * hh * d1;
    };
    PhasePoint out;
    out.pos = {H(a.pos.x, da.pos.x, b.pos.x, db.pos.x),
               H(a.pos.y, da.pos.y, b.pos.y, db.pos.y)};
    out.vel = {H(a.vel.x, da.vel.x, b.vel.x, db.vel.x),
               H(a.vel.y, da.vel.y, b.vel.y, db.vel.y)};
    return out;
  };

  while (t_cur < Tmax) {
    const double hh = std::min(h, Tmax - t_cur);
    PhasePoint da = flow_rhs(sys, cur);
    PhasePoint nxt = rk4_step(sys, cur, hh);
    if (!sys.chart.valid(nxt.pos))
      throw ValidityError("orbit left the chart validity region", cur.pos, t_cur);
    nxt = renormalize(sys, nxt);
    PhasePoint db = flow_rhs(sys, nxt);
    for (int k = 1; k <= subs; ++k) {
      const double u = static_cast<double>(k) / subs;
      PhasePoint p = (k == subs) ? nxt : hermite_between(cur, da, nxt, db, hh, u);
      const double t_here = t_cur + u * hh;
      const double f = dom.signed_dist(p.pos);
      if (f > 0.0) {
        // bisect between (t_prev, f_prev <= 0) and (t_here, f > 0)
        double lo = t_prev, hi = t_here;
        while (hi - lo > kEventTimeTol) {
          const double mid = 0.5 * (lo + hi);
          const double um = (mid - t_cur) / hh;
          PhasePoint pm = um <= 0.0
                              ? state_prev
                              : hermite_between(cur, da, nxt, db, hh, um);
          if (dom.signed_dist(pm.pos) > 0.0) hi = mid;
          else lo = mid;
        }
        const double t_hit = 0.5 * (lo + hi);
        const double uh = (t_hit - t_cur) / hh;
        PhasePoint ph = uh <= 0.0 ? state_prev
                                  : hermite_between(cur, da, nxt, db, hh, uh);
        ph = renormalize(sys, ph);
        return std::make_pair(t_hit, ph);
      }
      t_prev = t_here;
      f_prev = f;
      state_prev = p;
    }
    cur = nxt;
    t_cur += hh;
  }
  return std::nullopt;
}

}  // namespace

ExitResult exit_event(const MagneticSystem& sys, const Domain& dom,
                      PhasePoint entry, double Tmax, const StepControl& ctrl) {
  if (std::abs(dom.signed_dist(entry.pos)) > 1e-9)
    throw ContractError("exit_event: entry point is not on the boundary");
  entry = renormalize(sys, entry);
  if (Tmax <= 0) Tmax = default_tmax(sys, dom);

  const double s = dom.arclen_of_point(entry.pos);
  Vec2 nu = dom.inward_normal(s);
  const double inward = sys.chart.inner(entry.pos, nu, entry.vel);
  if (inward < kGrazeTol) {
    return {ExitStatus::grazing, 0.0, entry};
  }
  auto hit = find_crossing(sys, dom, entry, Tmax, ctrl);
  if (!hit) return {ExitStatus::trapped, Tmax, entry};
  return {ExitStatus::exited, hit->first, hit->second};
}

ExitResult backward_exit(const MagneticSystem& sys, const Domain& dom,
                         PhasePoint state, double Tmax, const StepControl& ctrl) {
  if (dom.signed_dist(state.pos) > 1e-9)
    throw ContractError("backward_exit: state must be inside or on the boundary");
  if (Tmax <= 0) Tmax = default_tmax(sys, dom);
  MagneticSystem rsys = sys.reversed();
  PhasePoint back{state.pos, -state.vel};
  auto hit = find_crossing(rsys, dom, back, Tmax, ctrl);
  if (!hit) return {ExitStatus::trapped, -Tmax, back};
  PhasePoint exit = hit->second;
  exit.vel = -exit.vel;  // report in forward orientation
  return {ExitStatus::exited, -hit->first, exit};
}

ScatteringRecord scattering(const MagneticSystem& sys, const Domain& dom,
                            PhasePoint entry, double Tmax,
                            const StepControl& ctrl) {
  ScatteringRecord rec;
  rec.entry = renormalize(sys, entry);
  rec.s_in = dom.arclen_of_point(entry.pos);
  Vec2 T_in = dom.tangent(rec.s_in);
  Vec2 nu_in = dom.inward_normal(rec.s_in);
  rec.theta_in = std::atan2(sys.chart.inner(entry.pos, rec.entry.vel, nu_in),
                            sys.chart.inner(entry.pos, rec.entry.vel, T_in));

  ExitResult ex = exit_event(sys, dom, rec.entry, Tmax, ctrl);
  rec.status = ex.status;
  rec.l = ex.l;
  rec.exit = ex.exit;
  if (ex.status == ExitStatus::exited) {
    rec.s_out = dom.arclen_of_point(ex.exit.pos);
    Vec2 T_out = dom.tangent(rec.s_out);
    Vec2 nu_out = dom.inward_normal(rec.s_out);
    rec.theta_out =
        std::atan2(sys.chart.inner(ex.exit.pos, ex.exit.vel, nu_out),
                   sys.chart.inner(ex.exit.pos, ex.exit.vel, T_out));
    rec.l_backward = backward_exit(sys, dom, rec.entry, Tmax, ctrl).l;
  }
  return rec;
}

std::vector<ScatteringRecord> scattering_table(const MagneticSystem& sys,
                                               const Domain& dom, int n_boundary,
                                               int n_angle, double Tmax,
                                               const StepControl& ctrl,
                                               int threads) {
  if (n_boundary < 1 || n_angle < 1)
    throw ContractError("scattering_table: grid must be at least 1x1");
  if (Tmax <= 0) Tmax = default_tmax(sys, dom);
  const double L = dom.length();
  std::vector<ScatteringRecord> out(static_cast<size_t>(n_boundary) * n_angle);
  parallel_for(out.size(), threads, [&](size_t idx) {
    const int i = static_cast<int>(idx) / n_angle;
    const int j = static_cast<int>(idx) % n_angle;
    const double s = L * i / n_boundary;
    const double theta = 3.14159265358979323846 * (j + 1) / (n_angle + 1);
    Vec2 p = dom.point(s);
    Vec2 xi = std::cos(theta) * dom.tangent(s) + std::sin(theta) * dom.inward_normal(s);
    out[idx] = scattering(sys, dom, {p, xi}, Tmax, ctrl);
  });
  return out;
}

ScatterSups compare_scattering(const std::vector<ScatteringRecord>& A,
                               const std::vector<ScatteringRecord>& B,
                               double boundary_length) {
  if (A.size() != B.size())
    throw ContractError("compare_scattering: grid size mismatch");
  ScatterSups sup;
  for (size_t i = 0; i < A.size(); ++i) {
    if (std::abs(A[i].s_in - B[i].s_in) > 1e-9 ||
        std::abs(A[i].theta_in - B[i].theta_in) > 1e-9)
      throw ContractError("compare_scattering: grids differ at record " +
                          std::to_string(i));
    if (A[i].status != B[i].status) {
      ++sup.status_mismatches;
      continue;
    }
    if (A[i].status != ExitStatus::exited) continue;
    double ds = std::abs(A[i].s_out - B[i].s_out);
    ds = std::min(ds, boundary_length - ds);
    sup.position = std::max(sup.position, ds);
    sup.angle = std::max(sup.angle, std::abs(A[i].theta_out - B[i].theta_out));
    sup.time = std::max(sup.time, std::abs(A[i].l - B[i].l));
  }
  return sup;
}

double exit_ratio_sup(const std::vector<ScatteringRecord>& table) {
  double sup = 0.0;
  for (const auto& r : table) {
    if (r.status != ExitStatus::exited) continue;
    const double s = std::sin(r.theta_in);
    if (s > kGrazeTol) sup = std::max(sup, r.l / s);
  }
  return sup;
}

ConvexityMargin convexity_margin(const MagneticSystem& sys, const Domain& dom,
                                 int n_samples) {
  if (n_samples < 8) throw ContractError("convexity_margin: need >= 8 samples");
  if (dom.length() <= 0) throw ContractError("degenerate boundary");
  ConvexityMargin best;
  best.margin = 1e300;
  for (int i = 0; i < n_samples; ++i) {
    const double s = dom.length() * i / n_samples;
    Vec2 p = dom.point(s);
    const double k = dom.kappa(s);
    const double b = sys.b(p);
    // <Y(xi), nu> = +-b for the two unit tangents
    for (int dir : {1, -1}) {
      const double m = k - dir * b;
      if (m < best.margin) {
        best.margin = m;
        best.arclen = s;
        best.point = p;
        best.direction = dir;
      }
    }
  }
  return best;
}

std::vector<BoundaryConjugateFlag> boundary_conjugate_scan(
    const MagneticSystem& sys, const Domain& dom, int n_boundary, int n_angle,
    double h, double Tmax, const StepControl& ctrl, int threads) {
  if (h <= 0) throw ContractError("boundary_conjugate_scan: h must be > 0");
  ConvexityMargin m = convexity_margin(sys, dom, std::max(64, n_boundary));
  if (m.margin <= 0)
    throw ContractError("boundary_conjugate_scan: domain is not strictly "
                        "magnetically convex (margin " +
                        std::to_string(m.margin) + ")");
  if (Tmax <= 0) Tmax = default_tmax(sys, dom);
  const double L = dom.length();

  std::vector<std::optional<BoundaryConjugateFlag>> slots(
      static_cast<size_t>(n_boundary) * n_angle);
  parallel_for(slots.size(), threads, [&](size_t idx) {
    const int i = static_cast<int>(idx) / n_angle;
    const int j = static_cast<int>(idx) % n_angle;
    const double s = L * i / n_boundary;
    const double theta = 3.14159265358979323846 * (j + 1) / (n_angle + 1);
    Vec2 p = dom.point(s);
    Vec2 T = dom.tangent(s);
    Vec2 nu = dom.inward_normal(s);
    Vec2 xi = std::cos(theta) * T + std::sin(theta) * nu;

    auto exit_of = [&](double sigma) -> std::optional<PhasePoint> {
      Vec2 dir = std::cos(sigma) * xi + std::sin(sigma) * rot90(xi);
      ExitResult ex = exit_event(sys, dom, {p, dir}, Tmax, ctrl);
      if (ex.status != ExitStatus::exited) return std::nullopt;
      return ex.exit;
    };
    auto e0 = exit_of(0.0), ep = exit_of(h), em = exit_of(-h);
    if (!e0 || !ep || !em) return;
    Vec2 dc = (ep->pos - em->pos) / (2 * h);
    MetricJet mj = sys.chart.jet(e0->pos);
    const double ndc = sys.chart.gnorm(mj, dc);
    if (ndc < 1e-8) return;
    Vec2 v = e0->vel;  // unit
    Vec2 perp = dc - sys.chart.inner(mj, dc, v) * v;
    const double frac = sys.chart.gnorm(mj, perp) / ndc;
    if (frac < 1e-6)
      slots[idx] = BoundaryConjugateFlag{i, j, s, theta, frac};
  });

  std::vector<BoundaryConjugateFlag> flags;
  for (const auto& f : slots)
    if (f) flags.push_back(*f);
  return flags;
}

std::string to_string(SimplicityKind k) {
  switch (k) {
    case SimplicityKind::simple: return "simple";
    case SimplicityKind::not_strictly_convex: return "not_strictly_convex";
    case SimplicityKind::boundary_conjugate: return "boundary_conjugate";
    case SimplicityKind::trapped: return "trapped";
  }
  return "?";
}

Verdict simplicity_verdict(const MagneticSystem& sys, const Domain& dom,
                           int n_boundary, int n_angle, const StepControl& ctrl,
                           int threads) {
  ConvexityMargin m =
      convexity_margin(sys, dom, std::max(64, 4 * n_boundary));
  // margins at numerical-zero scale do not certify strictness
  if (m.margin <= 1e-9)
    return {SimplicityKind::not_strictly_convex, m.margin,
            "margin " + std::to_string(m.margin) + " at arclen " +
                std::to_string(m.arclen)};

  auto table = scattering_table(sys, dom, n_boundary, n_angle, 0.0, ctrl, threads);
  for (const auto& r : table)
    if (r.status == ExitStatus::trapped)
      return {SimplicityKind::trapped, m.margin,
              "trapped entry at arclen " + std::to_string(r.s_in) + " angle " +
                  std::to_string(r.theta_in)};

  auto flags = boundary_conjugate_scan(sys, dom, n_boundary, n_angle, 1e-4, 0.0,
                                       ctrl, threads);
  if (!flags.empty())
    return {SimplicityKind::boundary_conjugate, m.margin,
            "conjugate exit curve at arclen " + std::to_string(flags[0].s_in) +
                " angle " + std::to_string(flags[0].theta_in)};
  return {SimplicityKind::simple, m.margin, ""};
}

}  // namespace magsurf
