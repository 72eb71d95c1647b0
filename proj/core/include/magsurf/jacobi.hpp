#ifndef MAGSURF_JACOBI_HPP
#define MAGSURF_JACOBI_HPP

#include <array>
#include <optional>
#include <vector>

#include "magsurf/flow.hpp"

namespace magsurf {

// Adapted frame along a magnetic geodesic: e1 = gamma', e2 = rot90(gamma').
// Both satisfy e' = Y(e) along the orbit.
struct AdaptedFrame {
  Vec2 e1;
  Vec2 e2;
};

inline AdaptedFrame frame_of(const PhasePoint& p) { return {p.vel, rot90(p.vel)}; }

// Scalar coefficients of the 2D Jacobi system at a phase point:
//   f1' = g1,  f2' = g2,
//   g1' =  b g2 + (db.e1) f2,
//   g2' = -b g1 - (K - db.e2) f2.
// y12 = b is the frame coefficient <Y(e1), e2>; a21 = -db.e1 and
// a22 = K - db.e2 are the only nonzero a_ij in two dimensions.
struct JacobiCoeffs {
  double b;
  double db_e1;
  double db_e2;
  double K;
};

JacobiCoeffs jacobi_coeffs(const MagneticSystem& sys, const PhasePoint& p);

// Frame components (f1, f2) and derivatives (f1', f2') of a magnetic Jacobi
// field J = f1 e1 + f2 e2 along a trajectory, sampled on the same grid.
class JacobiState {
 public:
  struct Sample {
    std::array<double, 4> f;   // f1, f2, g1=f1', g2=f2'
    std::array<double, 4> fd;  // derivatives of the above
  };

  const std::vector<double>& times() const { return t_; }
  const std::vector<Sample>& samples() const { return samples_; }
  const std::vector<PhasePoint>& base() const { return base_; }
  double duration() const { return t_.back(); }
  double step() const { return step_; }
  const PhasePoint& base_start() const { return base_.front(); }

  std::array<double, 4> eval(double t) const;  // dense (f1, f2, f1', f2')

  // Reconstructed J(t) in chart coordinates.
  Vec2 J(double t) const;
  // Covariant derivative J'(t) in chart coordinates.
  Vec2 Jprime(const MagneticSystem& sys, double t) const;
  // <J'(t), gamma'(t)>_g, conserved (zero) along any propagation.
  double jprime_dot_gamma(double t) const;

  friend JacobiState propagate_jacobi(const MagneticSystem& sys,
                                      const Trajectory& traj, Vec2 J0, Vec2 J0p);

 private:
  std::vector<double> t_;
  std::vector<Sample> samples_;
  std::vector<PhasePoint> base_;
  std::vector<double> b_;  // field strength at base samples
  double step_ = 0.0;

  size_t locate(double t) const;
};

// Propagate the magnetic Jacobi field with initial value J0 and initial
// covariant derivative J0p (chart coordinates, <J0p, gamma'(0)>_g must be 0),
// co-integrated with the base flow on the trajectory's grid.
JacobiState propagate_jacobi(const MagneticSystem& sys, const Trajectory& traj,
                             Vec2 J0, Vec2 J0p);

// Relative discrepancy between the Jacobi field J_v(t) and the central
// finite difference of s -> exp(t * xi(s)) with xi(s) the rotation of xi
// at unit rate toward v. Requires |v|_g = 1 and v perpendicular to xi.
double variational_consistency(const MagneticSystem& sys, Vec2 x, Vec2 xi,
                               Vec2 v, double t, double h,
                               const StepControl& ctrl = {});

// <Jv, Jw'> - <Jv', Jw> + <Y(Jv), Jw> at time t. Zero for pairs vanishing
// at t = 0; constant in t in general.
double symplectic_pairing(const JacobiState& Jv, const JacobiState& Jw,
                          const MagneticSystem& sys, const Trajectory& traj,
                          double t);

struct ConjugatePoint {
  double t;
  int multiplicity;  // always 1 in two dimensions
  bool marginal;     // |f2| dipped below tolerance without a sign change
};

// First conjugate time along the orbit from (x, xi): first zero of the
// perpendicular component of the J(0)=0, J'(0)=e2 field in (0, Tmax].
std::optional<ConjugatePoint> first_conjugate(const MagneticSystem& sys, Vec2 x,
                                              Vec2 xi, double Tmax,
                                              const StepControl& ctrl = {});

}  // namespace magsurf

#endif
