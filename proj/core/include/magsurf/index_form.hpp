#ifndef MAGSURF_INDEX_FORM_HPP
#define MAGSURF_INDEX_FORM_HPP

#include <functional>
#include <optional>
#include <vector>

#include "magsurf/jacobi.hpp"

namespace magsurf {

// Piecewise smooth perpendicular field Z = u(t) e2 along a trajectory,
// with one-sided derivatives at breakpoints.
struct FieldOnGeodesic {
  struct Piece {
    double t0;
    double t1;
    std::function<double(double)> u;
    std::function<double(double)> du;
  };
  std::vector<Piece> pieces;  // contiguous, covering [0, T]
  bool vanishes_at_start = false;
  bool vanishes_at_end = false;

  static FieldOnGeodesic smooth(double T, std::function<double(double)> u,
                                std::function<double(double)> du,
                                bool v0 = false, bool vT = false);

  double value(double t) const;
  double deriv(double t) const;
  double start() const { return pieces.front().t0; }
  double stop() const { return pieces.back().t1; }
};

// Ind(Z) = integral of |Z'|^2 - <C(Z), Z> - <Y(gamma'), Z>^2 by composite
// Gauss quadrature per piece. gauss_pts must be 4, 8 or 16.
double index_evaluate(const MagneticSystem& sys, const Trajectory& traj,
                      const FieldOnGeodesic& Z, int gauss_pts = 8);

struct GramSummary {
  int segments;
  double smallest_eigenvalue;
  double largest_eigenvalue;
  int negative_count;
};

// Quadratic form of the index on the span of N-1 piecewise linear hat
// functions with vanishing endpoints; positive smallest eigenvalue means
// positive definite on that subspace.
GramSummary index_gram(const MagneticSystem& sys, const Trajectory& traj, int N,
                       int gauss_pts = 8);

// Eigenvalue tolerance below which the Gram spectrum is treated as having a
// kernel at segment count N.
inline double gram_kernel_tol(int N) { return 10.0 / (double(N) * N); }

// Negative-index field from an interior conjugate time t0: the vanishing
// Jacobi field up to t0, zero afterwards, with the eps-window around t0
// replaced by the Jacobi bridge with matched endpoints.
FieldOnGeodesic cut_corner(const MagneticSystem& sys, const Trajectory& traj,
                           double t0, double eps);

struct IndexLemmaReport {
  int trials;
  double jacobi_index;
  double given_index;
  double min_margin;            // min over trials of Ind(Z) - Ind(J)
  double reversed_min_margin;   // same for the reversed-endpoint variant
  bool equality_consistent;     // equality occurred only at field equality
};

// Verify Ind(J_perp) <= Ind(Z) for the Jacobi field matching Z's endpoints,
// for Z itself and `trials` random perturbations with matched endpoints;
// the reversed-endpoint variant runs on the reversed system.
IndexLemmaReport index_lemma_check(const MagneticSystem& sys,
                                   const Trajectory& traj,
                                   const FieldOnGeodesic& Z, int trials,
                                   unsigned long seed = 1);

struct SweepPoint {
  double T;
  double smallest_eigenvalue;
};

struct SweepResult {
  std::vector<SweepPoint> table;
  std::optional<double> first_crossing;  // first T with eigenvalue <= kernel tol
};

// Gram smallest eigenvalue swept over trajectory lengths [T0, T1].
SweepResult index_family_sweep(const MagneticSystem& sys, Vec2 x, Vec2 xi,
                               double T0, double T1, int count, int N,
                               const StepControl& ctrl = {});

}  // namespace magsurf

#endif
