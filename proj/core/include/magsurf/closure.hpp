#ifndef MAGSURF_CLOSURE_HPP
#define MAGSURF_CLOSURE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "magsurf/boundary.hpp"

namespace magsurf {

constexpr double kClosureTol = 1e-6;

enum class OrbitStatus { closed, open };

std::string to_string(OrbitStatus s);

struct OrbitRecord {
  PhasePoint initial;
  double period = 0.0;       // candidate period T*
  double closure_gap = 0.0;  // chart distance + velocity angle at T*
  int pass_count = -1;       // m; -1 when not computed
  OrbitStatus status = OrbitStatus::open;
};

// Weights of the phase distance used for closure detection.
struct PhaseWeights {
  double position = 1.0;
  double angle = 1.0;
};

double phase_dist(PhasePoint a, PhasePoint b, const PhaseWeights& w = {});

// First near-return of the orbit: coarse scan of the phase distance over
// (0, Tmax], golden-section refinement of the first local minimum under the
// scan threshold. pass_count is left unset.
OrbitRecord closure_gap(const MagneticSystem& sys, PhasePoint start,
                        double Tmax, const StepControl& ctrl = {},
                        const PhaseWeights& w = {});

// Number of maximal sub-intervals of [0, T*) with the orbit inside dom.
// Tangential touch without interior entry counts as one pass.
int pass_count(const MagneticSystem& sys, PhasePoint start,
               const DomainSpec& dom, double Tstar,
               const StepControl& ctrl = {});

struct CensusReport {
  int orbits = 0;
  int closed = 0;
  double fraction_closed = 0.0;
  double worst_gap = 0.0;
  PhasePoint worst_start;
  std::map<int, int> m_histogram;
  std::vector<OrbitRecord> records;
  std::optional<ScatterSups> scatter_sups;  // vs baseline, when supplied
};

// Closed-orbit census over a boundary-entry grid of dom (same layout as
// scattering_table). When baseline is given, its scattering table on the
// identical grid is compared record by record.
CensusReport closure_census(const MagneticSystem& sys, const Domain& dom,
                            int n_boundary, int n_angle, double Tmax,
                            const MagneticSystem* baseline = nullptr,
                            const StepControl& ctrl = {}, int threads = 1);

}  // namespace magsurf

#endif
