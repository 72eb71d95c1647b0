#ifndef MAGSURF_FLOW_HPP
#define MAGSURF_FLOW_HPP

#include <vector>

#include "magsurf/magnetic.hpp"

namespace magsurf {

// Unit-speed phase point (x, xi) in SM. Velocity is stored in chart
// coordinates; |velocity|_g must be 1 within unit_speed_tol.
struct PhasePoint {
  Vec2 pos;
  Vec2 vel;
};

struct StepControl {
  double step_scale = 1e-3;     // h = step_scale * min(1, 1/max|b|, 1/sqrt|K|)
  double unit_speed_tol = 1e-10;
  bool adaptive = false;        // step-doubling error control
  double adaptive_tol = 1e-12;  // per-step tolerance when adaptive
  double min_step = 1e-12;
};

// Choose the fixed step for a run of the given system near a start point.
double default_step(const MagneticSystem& sys, const PhasePoint& start,
                    const StepControl& ctrl);

// Sampled magnetic geodesic with cubic Hermite dense output per step.
class Trajectory {
 public:
  const std::vector<double>& times() const { return t_; }
  const std::vector<PhasePoint>& samples() const { return s_; }
  // Stored derivatives (velocity, acceleration) at each sample.
  const std::vector<PhasePoint>& derivatives() const { return d_; }

  double duration() const { return t_.empty() ? 0.0 : t_.back(); }
  const PhasePoint& start() const { return s_.front(); }
  const PhasePoint& end() const { return s_.back(); }

  // Dense evaluation on [0, duration]; reproduces samples exactly at nodes.
  PhasePoint eval(double t) const;
  // Dense evaluation with velocity renormalized to unit g-norm.
  PhasePoint eval_unit(const MagneticSystem& sys, double t) const;

  int renormalization_count() const { return renorm_count_; }
  double max_step_drift() const { return max_step_drift_; }
  double total_drift() const { return total_drift_; }
  double step() const { return step_; }

  friend Trajectory integrate(const MagneticSystem& sys, PhasePoint start,
                              double T, const StepControl& ctrl);

 private:
  std::vector<double> t_;
  std::vector<PhasePoint> s_;
  std::vector<PhasePoint> d_;
  double step_ = 0.0;
  int renorm_count_ = 0;
  double max_step_drift_ = 0.0;
  double total_drift_ = 0.0;

  size_t locate(double t) const;
};

// Solve x'' + Gamma(x', x') = Y(x') with classical RK4 and per-step
// renormalization of the velocity to unit g-norm.
Trajectory integrate(const MagneticSystem& sys, PhasePoint start, double T,
                     const StepControl& ctrl = {});

// Right-hand side of the first-order system: returns (velocity, acceleration).
PhasePoint flow_rhs(const MagneticSystem& sys, const PhasePoint& state);

// One RK4 step from `state` with step h; no renormalization.
PhasePoint rk4_step(const MagneticSystem& sys, const PhasePoint& state,
                    double h);

// Renormalize velocity to unit g-norm at its base point.
PhasePoint renormalize(const MagneticSystem& sys, PhasePoint p);

// Position of the magnetic flow of (x, xi) at time t >= 0.
Vec2 magnetic_exp(const MagneticSystem& sys, Vec2 x, Vec2 xi, double t,
                  const StepControl& ctrl = {});

}  // namespace magsurf

#endif
