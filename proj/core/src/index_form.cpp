#include "magsurf/index_form.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

namespace magsurf {

namespace {

struct GaussRule {
  const double* x;
  const double* w;
  int n;
};

// Gauss-Legendre nodes/weights on [-1, 1].
const double g4x[] = {-0.8611363115940526, -0.3399810435848563,
                      0.3399810435848563, 0.8611363115940526};
const double g4w[] = {0.3478548451374538, 0.6521451548625461,
                      0.6521451548625461, 0.3478548451374538};
const double g8x[] = {-0.9602898564975363, -0.7966664774136267,
                      -0.5255324099163290, -0.1834346424956498,
                      0.1834346424956498,  0.5255324099163290,
                      0.7966664774136267,  0.9602898564975363};
const double g8w[] = {0.1012285362903763, 0.2223810344533745,
                      0.3137066458778873, 0.3626837833783620,
                      0.3626837833783620, 0.3137066458778873,
                      0.2223810344533745, 0.1012285362903763};
const double g16x[] = {-0.9894009349916499, -0.9445750230732326,
                       -0.8656312023878318, -0.7554044083550030,
                       -0.6178762444026438, -0.4580167776572274,
                       -0.2816035507792589, -0.0950125098376374,
                       0.0950125098376374,  0.2816035507792589,
                       0.4580167776572274,  0.6178762444026438,
                       0.7554044083550030,  0.8656312023878318,
                       0.9445750230732326,  0.9894009349916499};
const double g16w[] = {0.0271524594117541, 0.0622535239386479,
                       0.0951585116824928, 0.1246289712555339,
                       0.1495959888165767, 0.1691565193950025,
                       0.1826034150449236, 0.1894506104550685,
                       0.1894506104550685, 0.1826034150449236,
                       0.1691565193950025, 0.1495959888165767,
                       0.1246289712555339, 0.0951585116824928,
                       0.0622535239386479, 0.0271524594117541};

GaussRule gauss_rule(int n) {
  switch (n) {
    case 4: return {g4x, g4w, 4};
    case 8: return {g8x, g8w, 8};
    case 16: return {g16x, g16w, 16};
  }
  throw ContractError("gauss_pts must be 4, 8 or 16");
}

// Index integrand at one time: |Z'|^2 - <C(Z),Z> - <Y(gamma'),Z>^2 with
// Z = u e2, Z' = u' e2 - u b e1.
double integrand(const MagneticSystem& sys, const Trajectory& traj, double t,
                 double u, double du) {
  PhasePoint p = traj.eval_unit(sys, t);
  JacobiCoeffs c = jacobi_coeffs(sys, p);
  const double zp2 = du * du + u * u * c.b * c.b;
  const double cz_z = c.K * u * u + c.b * c.b * u * u - c.db_e2 * u * u;
  const double yz2 = c.b * c.b * u * u;
  return zp2 - cz_z - yz2;
}

template <typename F>
double gauss_integrate(const F& f, double a, double b, const GaussRule& rule,
                       double max_panel) {
  if (b <= a) return 0.0;
  int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    for (int i = 0; i < rule.n; ++i)
      sum += rule.w[i] * f(mid + 0.5 * h * rule.x[i]);
    // weight scaling folded below
  }
  return sum * 0.5 * h;
}

}  // namespace

FieldOnGeodesic FieldOnGeodesic::smooth(double T, std::function<double(double)> u,
                                        std::function<double(double)> du,
                                        bool v0, bool vT) {
  FieldOnGeodesic z;
  z.pieces.push_back({0.0, T, std::move(u), std::move(du)});
  z.vanishes_at_start = v0;
  z.vanishes_at_end = vT;
  return z;
}

double FieldOnGeodesic::value(double t) const {
  if (vanishes_at_start && t <= pieces.front().t0) return 0.0;
  if (vanishes_at_end && t >= pieces.back().t1) return 0.0;
  for (const auto& p : pieces)
    if (t <= p.t1) return p.u(std::max(t, p.t0));
  return pieces.back().u(pieces.back().t1);
}

double FieldOnGeodesic::deriv(double t) const {
  for (const auto& p : pieces)
    if (t <= p.t1) return p.du(std::max(t, p.t0));
  return pieces.back().du(pieces.back().t1);
}

double index_evaluate(const MagneticSystem& sys, const Trajectory& traj,
                      const FieldOnGeodesic& Z, int gauss_pts) {
  const double T = traj.duration();
  if (Z.pieces.empty()) throw ContractError("index_evaluate: empty field");
  for (const auto& p : Z.pieces)
    if (p.t0 < -1e-12 || p.t1 > T + 1e-12 || p.t1 <= p.t0)
      throw ContractError("index_evaluate: breakpoints outside [0, T]");
  GaussRule rule = gauss_rule(gauss_pts);
  const double max_panel = std::max(traj.step() * 50.0, 1e-6);
  double sum = 0.0;
  for (const auto& p : Z.pieces) {
    sum += gauss_integrate(
        [&](double t) { return integrand(sys, traj, t, p.u(t), p.du(t)); },
        p.t0, p.t1, rule, max_panel);
  }
  return sum;
}

GramSummary index_gram(const MagneticSystem& sys, const Trajectory& traj, int N,
                       int gauss_pts) {
  if (N < 4) throw ContractError("index_gram: N must be >= 4");
  const double T = traj.duration();
  const double h = T / N;
  GaussRule rule = gauss_rule(gauss_pts);

  // Hat basis phi_1..phi_{N-1}; the form is tridiagonal.
  auto hat = [&](int i, double t) {
    const double c = i * h;
    const double d = std::abs(t - c);
    return d >= h ? 0.0 : 1.0 - d / h;
  };
  auto dhat = [&](int i, double t) {
    const double c = i * h;
    if (t <= c - h || t >= c + h) return 0.0;
    return t < c ? 1.0 / h : -1.0 / h;
  };

  // Q(t) such that the integrand on Z = u e2 is u'^2 - Q u^2.
  auto Q = [&](double t) {
    JacobiCoeffs c = jacobi_coeffs(sys, traj.eval_unit(sys, t));
    return c.K + c.b * c.b - c.db_e2;
  };

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N - 1, N - 1);
  const double max_panel = h;  // one panel per segment is plenty for hats
  for (int i = 1; i <= N - 1; ++i) {
    for (int j = i; j <= std::min(N - 1, i + 1); ++j) {
      const double lo = (j - 1) * h;
      const double hi = std::min(T, (i + 1) * h);
      double v = gauss_integrate(
          [&](double t) {
            return dhat(i, t) * dhat(j, t) - Q(t) * hat(i, t) * hat(j, t);
          },
          lo, hi, rule, max_panel);
      G(i - 1, j - 1) = v;
      G(j - 1, i - 1) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  GramSummary s;
  s.segments = N;
  s.smallest_eigenvalue = ev(0);
  s.largest_eigenvalue = ev(N - 2);
  s.negative_count = 0;
  for (int i = 0; i < N - 1; ++i)
    if (ev(i) < 0) ++s.negative_count;
  return s;
}

namespace {

// Dense solution of the scalar Jacobi equation u'' + Q(t) u = 0 on [a, b],
// stored as Hermite data on a uniform grid.
struct ScalarSolution {
  double a, h;
  std::vector<double> u, du;

  double value(double t) const {
    size_t k = std::min(u.size() - 2,
                        static_cast<size_t>(std::max(0.0, (t - a) / h)));
    const double s = (t - (a + k * h)) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * u[k] + (s3 - 2 * s2 + s) * h * du[k] +
           (-2 * s3 + 3 * s2) * u[k + 1] + (s3 - s2) * h * du[k + 1];
  }
  double deriv(double t) const {
    size_t k = std::min(u.size() - 2,
                        static_cast<size_t>(std::max(0.0, (t - a) / h)));
    const double s = (t - (a + k * h)) / h;
    return (1 - s) * du[k] + s * du[k + 1];
  }
};

ScalarSolution solve_scalar_jacobi(const MagneticSystem& sys,
                                   const Trajectory& traj, double a, double b,
                                   double u0, double du0) {
  auto Q = [&](double t) {
    JacobiCoeffs c = jacobi_coeffs(sys, traj.eval_unit(sys, t));
    return c.K + c.b * c.b - c.db_e2;
  };
  const double hbase = traj.step();
  const int n = std::max(2, static_cast<int>(std::ceil((b - a) / hbase)));
  const double h = (b - a) / n;
  ScalarSolution sol;
  sol.a = a;
  sol.h = h;
  sol.u.reserve(n + 1);
  sol.du.reserve(n + 1);
  double u = u0, du = du0;
  sol.u.push_back(u);
  sol.du.push_back(du);
  for (int i = 0; i < n; ++i) {
    const double t = a + i * h;
    auto rhs = [&](double tt, double uu, double dd) {
      return std::pair<double, double>{dd, -Q(tt) * uu};
    };
    auto [k1u, k1d] = rhs(t, u, du);
    auto [k2u, k2d] = rhs(t + 0.5 * h, u + 0.5 * h * k1u, du + 0.5 * h * k1d);
    auto [k3u, k3d] = rhs(t + 0.5 * h, u + 0.5 * h * k2u, du + 0.5 * h * k2d);
    auto [k4u, k4d] = rhs(t + h, u + h * k3u, du + h * k3d);
    u += (h / 6.0) * (k1u + 2 * k2u + 2 * k3u + k4u);
    du += (h / 6.0) * (k1d + 2 * k2d + 2 * k3d + k4d);
    sol.u.push_back(u);
    sol.du.push_back(du);
  }
  return sol;
}

FieldOnGeodesic jacobi_perp_field(std::shared_ptr<JacobiState> J, double t0,
                                  double t1, double scale) {
  FieldOnGeodesic z;
  auto u = [J, scale](double t) { return scale * J->eval(t)[1]; };
  auto du = [J, scale](double t) { return scale * J->eval(t)[3]; };
  z.pieces.push_back({t0, t1, u, du});
  return z;
}

}  // namespace

FieldOnGeodesic cut_corner(const MagneticSystem& sys, const Trajectory& traj,
                           double t0, double eps) {
  const double T = traj.duration();
  if (!(t0 > 0 && t0 < T))
    throw ContractError("cut_corner: conjugate time must be interior to (0, T)");
  if (!(eps > 0 && eps < std::min(t0, T - t0)))
    throw ContractError("cut_corner: eps must satisfy 0 < eps < min(t0, T - t0)");

  auto J = std::make_shared<JacobiState>(
      propagate_jacobi(sys, traj, {0, 0}, rot90(traj.start().vel)));

  const double ul = J->eval(t0 - eps)[1];
  // Jacobi bridge on [t0-eps, t0+eps] with values (ul, 0) at the ends.
  ScalarSolution p = solve_scalar_jacobi(sys, traj, t0 - eps, t0 + eps, 1.0, 0.0);
  ScalarSolution q = solve_scalar_jacobi(sys, traj, t0 - eps, t0 + eps, 0.0, 1.0);
  const double pr = p.value(t0 + eps), qr = q.value(t0 + eps);
  if (std::abs(qr) < 1e-14)
    throw ContractError("cut_corner: bridge endpoints conjugate, shrink eps");
  const double alpha = ul;
  const double beta = -ul * pr / qr;
  auto ps = std::make_shared<ScalarSolution>(std::move(p));
  auto qs = std::make_shared<ScalarSolution>(std::move(q));

  FieldOnGeodesic z;
  z.vanishes_at_start = true;
  z.vanishes_at_end = true;
  z.pieces.push_back({0.0, t0 - eps,
                      [J](double t) { return J->eval(t)[1]; },
                      [J](double t) { return J->eval(t)[3]; }});
  z.pieces.push_back({t0 - eps, t0 + eps,
                      [ps, qs, alpha, beta](double t) {
                        return alpha * ps->value(t) + beta * qs->value(t);
                      },
                      [ps, qs, alpha, beta](double t) {
                        return alpha * ps->deriv(t) + beta * qs->deriv(t);
                      }});
  z.pieces.push_back({t0 + eps, T, [](double) { return 0.0; },
                      [](double) { return 0.0; }});
  return z;
}

IndexLemmaReport index_lemma_check(const MagneticSystem& sys,
                                   const Trajectory& traj,
                                   const FieldOnGeodesic& Z, int trials,
                                   unsigned long seed) {
  const double T = traj.duration();
  const PhasePoint s0 = traj.start();
  if (first_conjugate(sys, s0.pos, s0.vel, T))
    throw ContractError("index_lemma_check: trajectory has a conjugate point");
  if (!Z.vanishes_at_start)
    throw ContractError("index_lemma_check: Z must vanish at t = 0");

  auto run = [&](const MagneticSystem& s, const Trajectory& tr,
                 std::function<double(double)> u,
                 std::function<double(double)> du, std::mt19937_64& rng,
                 int ntrials, double* jacobi_index,
                 double* given_index) -> double {
    const double TT = tr.duration();
    auto J = std::make_shared<JacobiState>(
        propagate_jacobi(s, tr, {0, 0}, rot90(tr.start().vel)));
    const double f2T = J->eval(TT)[1];
    if (std::abs(f2T) < 1e-14)
      throw ContractError("index_lemma_check: endpoint conjugate to start");
    const double scale = u(TT) / f2T;
    FieldOnGeodesic jz = jacobi_perp_field(J, 0.0, TT, scale);
    jz.vanishes_at_start = true;
    const double indJ = index_evaluate(s, tr, jz);
    if (jacobi_index) *jacobi_index = indJ;

    FieldOnGeodesic given = FieldOnGeodesic::smooth(TT, u, du, true, false);
    const double indZ = index_evaluate(s, tr, given);
    if (given_index) *given_index = indZ;

    double min_margin = indZ - indJ;
    std::uniform_real_distribution<double> amp(-0.3, 0.3);
    for (int k = 0; k < ntrials; ++k) {
      double c1 = amp(rng), c2 = amp(rng), c3 = amp(rng), c4 = amp(rng);
      auto w = [=](double t) {
        const double s1 = 3.14159265358979323846 / TT;
        return c1 * std::sin(s1 * t) + c2 * std::sin(2 * s1 * t) +
               c3 * std::sin(3 * s1 * t) + c4 * std::sin(4 * s1 * t);
      };
      auto dw = [=](double t) {
        const double s1 = 3.14159265358979323846 / TT;
        return s1 * (c1 * std::cos(s1 * t) + 2 * c2 * std::cos(2 * s1 * t) +
                     3 * c3 * std::cos(3 * s1 * t) + 4 * c4 * std::cos(4 * s1 * t));
      };
      FieldOnGeodesic zt = FieldOnGeodesic::smooth(
          TT, [=](double t) { return u(t) + w(t); },
          [=](double t) { return du(t) + dw(t); }, true, false);
      min_margin = std::min(min_margin, index_evaluate(s, tr, zt) - indJ);
    }
    return min_margin;
  };

  std::mt19937_64 rng(seed);
  IndexLemmaReport rep{};
  rep.trials = trials;
  rep.min_margin =
      run(sys, traj, [&Z](double t) { return Z.value(t); },
          [&Z](double t) { return Z.deriv(t); }, rng, trials,
          &rep.jacobi_index, &rep.given_index);

  // Reversed-endpoint variant: same check on the reversed system along the
  // reversed trajectory (fields vanishing at T with matched start values).
  MagneticSystem rsys = sys.reversed();
  PhasePoint endp = traj.end();
  Trajectory rtraj = integrate(rsys, {endp.pos, -endp.vel}, T);
  auto Jr = std::make_shared<JacobiState>(
      propagate_jacobi(rsys, rtraj, {0, 0}, rot90(rtraj.start().vel)));
  const double f2r = Jr->eval(T)[1];
  std::function<double(double)> ur = [Jr, f2r](double t) {
    return Jr->eval(t)[1] / std::abs(f2r);
  };
  std::function<double(double)> dur = [Jr, f2r](double t) {
    return Jr->eval(t)[3] / std::abs(f2r);
  };
  rep.reversed_min_margin =
      run(rsys, rtraj, ur, dur, rng, trials, nullptr, nullptr);

  // Equality must hold exactly when Z equals the scaled Jacobi field: sample
  // the L2 distance and compare with the index gap.
  auto Jf = std::make_shared<JacobiState>(
      propagate_jacobi(sys, traj, {0, 0}, rot90(traj.start().vel)));
  const double scale = Z.value(T) / Jf->eval(T)[1];
  double l2 = 0.0;
  const int ns = 200;
  for (int i = 0; i <= ns; ++i) {
    const double t = T * i / ns;
    const double d = Z.value(t) - scale * Jf->eval(t)[1];
    l2 += d * d * (T / ns);
  }
  l2 = std::sqrt(l2);
  const bool equal_fields = l2 < 1e-6;
  const double gap = rep.given_index - rep.jacobi_index;
  rep.equality_consistent = equal_fields ? std::abs(gap) <= 1e-8 : gap > 0.0;
  return rep;
}

SweepResult index_family_sweep(const MagneticSystem& sys, Vec2 x, Vec2 xi,
                               double T0, double T1, int count, int N,
                               const StepControl& ctrl) {
  if (count < 2 || T1 <= T0 || T0 <= 0)
    throw ContractError("index_family_sweep: bad sweep range");
  SweepResult res;
  for (int i = 0; i < count; ++i) {
    const double T = T0 + (T1 - T0) * i / (count - 1);
    Trajectory traj = integrate(sys, {x, xi}, T, ctrl);
    GramSummary g = index_gram(sys, traj, N);
    res.table.push_back({T, g.smallest_eigenvalue});
    if (!res.first_crossing && g.smallest_eigenvalue <= gram_kernel_tol(N))
      res.first_crossing = T;
  }
  return res;
}

}  // namespace magsurf
