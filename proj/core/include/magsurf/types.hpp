#ifndef MAGSURF_TYPES_HPP
#define MAGSURF_TYPES_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace magsurf {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Coordinate rotation by +90 degrees. In a conformal chart this is also the
// metric rotation, so it realizes the 2D Lorentz operator up to the factor b.
inline Vec2 rot90(Vec2 v) { return {-v.y, v.x}; }

// Error thrown when an orbit or query leaves the chart's validity region.
struct ValidityError : std::domain_error {
  Vec2 last_position;
  double exit_time;
  ValidityError(const std::string& what, Vec2 p, double t)
      : std::domain_error(what), last_position(p), exit_time(t) {}
};

// Violated operation precondition.
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Step underflow or other integrator breakdown.
struct StiffnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace magsurf

#endif
