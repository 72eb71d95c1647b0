#ifndef MAGSURF_BOUNDARY_HPP
#define MAGSURF_BOUNDARY_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "magsurf/flow.hpp"

namespace magsurf {

// Closed simple boundary curve in chart coordinates: a circle or a smooth
// parametric curve with derivatives and an inside predicate.
struct DomainSpec {
  bool is_circle = true;
  Vec2 center;
  double radius = 1.0;

  std::function<Vec2(double)> point;   // parametric curve, q in [0, period)
  std::function<Vec2(double)> d1;
  std::function<Vec2(double)> d2;
  double period = 0.0;
  std::function<bool(Vec2)> inside_fn;

  static DomainSpec circle(Vec2 center, double radius);
  static DomainSpec parametric(std::function<Vec2(double)> point,
                               std::function<Vec2(double)> d1,
                               std::function<Vec2(double)> d2, double period,
                               std::function<bool(Vec2)> inside);

  Vec2 point_at(double q) const;
  Vec2 deriv_at(double q) const;
  Vec2 second_at(double q) const;
  double param_period() const { return is_circle ? 6.283185307179586476925287 : period; }

  // Signed boundary function: negative inside, zero on the boundary. Exact
  // for circles; closest-point distance (Newton refined) otherwise.
  double signed_dist(Vec2 p) const;
  bool inside(Vec2 p) const { return signed_dist(p) < 0.0; }
  double param_of_point(Vec2 p) const;
};

// Chart-aware boundary geometry: intrinsic (g) arc length, unit tangent and
// inward normal, and boundary geodesic curvature.
class Domain {
 public:
  Domain(const ChartMetric& chart, DomainSpec spec, int table_size = 2048);

  const DomainSpec& spec() const { return spec_; }
  double length() const { return total_len_; }

  double arclen_of_param(double q) const;
  double param_of_arclen(double s) const;
  double arclen_of_point(Vec2 p) const {
    return arclen_of_param(spec_.param_of_point(p));
  }

  Vec2 point(double s) const { return spec_.point_at(param_of_arclen(s)); }
  // g-unit boundary tangent and inward normal, chart coordinates.
  Vec2 tangent(double s) const;
  Vec2 inward_normal(double s) const;
  // Boundary geodesic curvature wrt the inward normal; equals II(x, xi)
  // for unit tangents xi in two dimensions.
  double kappa(double s) const;
  // Finite-difference cross check via the Euclidean tangent angle.
  double kappa_fd(double s, double h = 1e-5) const;

  double signed_dist(Vec2 p) const { return spec_.signed_dist(p); }
  bool inside(Vec2 p) const { return spec_.inside(p); }

 private:
  ChartMetric chart_;  // owned copy; charts are small value types
  DomainSpec spec_;
  std::vector<double> cum_;  // cumulative g-length at table nodes
  double total_len_ = 0.0;
  int orient_ = 1;  // +1 if rot90(tangent) points inward
};

enum class ExitStatus { exited, grazing, trapped };

std::string to_string(ExitStatus s);

struct ExitResult {
  ExitStatus status;
  double l = 0.0;
  PhasePoint exit;
};

// Default trapped-detection cutoff for a system/domain pair.
double default_tmax(const MagneticSystem& sys, const Domain& dom);

// Forward exit event from a boundary phase point (entry within 1e-9 of the
// boundary): first boundary crossing, bisected to time tolerance 1e-10.
// Near-tangent entries (<nu, xi> below 1e-6) are classified grazing with l=0.
ExitResult exit_event(const MagneticSystem& sys, const Domain& dom,
                      PhasePoint entry, double Tmax = 0.0,
                      const StepControl& ctrl = {});

// Backward exit time l- <= 0 via the reversed system.
ExitResult backward_exit(const MagneticSystem& sys, const Domain& dom,
                         PhasePoint state, double Tmax = 0.0,
                         const StepControl& ctrl = {});

struct ScatteringRecord {
  PhasePoint entry;
  PhasePoint exit;
  double l = 0.0;
  double l_backward = 0.0;
  double s_in = 0.0;
  double theta_in = 0.0;
  double s_out = 0.0;
  double theta_out = 0.0;
  ExitStatus status = ExitStatus::exited;
};

ScatteringRecord scattering(const MagneticSystem& sys, const Domain& dom,
                            PhasePoint entry, double Tmax = 0.0,
                            const StepControl& ctrl = {});

// Grid of records over the inward boundary: arc length uniform (major),
// inward angle theta = pi (j+1)/(n_angle+1) (minor). Deterministic order.
std::vector<ScatteringRecord> scattering_table(const MagneticSystem& sys,
                                               const Domain& dom, int n_boundary,
                                               int n_angle, double Tmax = 0.0,
                                               const StepControl& ctrl = {},
                                               int threads = 1);

struct ScatterSups {
  double position = 0.0;  // boundary arc length
  double angle = 0.0;
  double time = 0.0;
  int status_mismatches = 0;
};

ScatterSups compare_scattering(const std::vector<ScatteringRecord>& A,
                               const std::vector<ScatteringRecord>& B,
                               double boundary_length);

// Sup of l / <nu, xi> over non-grazing exited records; bounded on strictly
// convex domains, so its stability under grid refinement is a useful check.
double exit_ratio_sup(const std::vector<ScatteringRecord>& table);

struct ConvexityMargin {
  double margin = 0.0;
  double arclen = 0.0;  // witness boundary point
  Vec2 point;
  int direction = 1;  // tangent orientation achieving the minimum
};

// min over boundary samples and both tangents of kappa(x) - <Y(xi), nu(x)>.
ConvexityMargin convexity_margin(const MagneticSystem& sys, const Domain& dom,
                                 int n_samples);

struct BoundaryConjugateFlag {
  int i_boundary;
  int j_angle;
  double s_in;
  double theta_in;
  double perp_fraction;  // |dc/ds perp| / |dc/ds|
};

// Central-difference scan of the exit-point curve; an entry is flagged when
// the exit derivative degenerates onto the exit velocity, signalling a pair
// of boundary points conjugate to each other.
std::vector<BoundaryConjugateFlag> boundary_conjugate_scan(
    const MagneticSystem& sys, const Domain& dom, int n_boundary, int n_angle,
    double h, double Tmax = 0.0, const StepControl& ctrl = {}, int threads = 1);

enum class SimplicityKind { simple, not_strictly_convex, boundary_conjugate, trapped };

std::string to_string(SimplicityKind k);

struct Verdict {
  SimplicityKind kind;
  double margin = 0.0;
  std::string witness;
};

// Boundary-data simplicity certificate: strict convexity, then no trapped
// orbits, then no boundary-conjugate flags.
Verdict simplicity_verdict(const MagneticSystem& sys, const Domain& dom,
                           int n_boundary, int n_angle,
                           const StepControl& ctrl = {}, int threads = 1);

}  // namespace magsurf

#endif
