#ifndef MAGSURF_JET_HPP
#define MAGSURF_JET_HPP

#include <cmath>
#include <stdexcept>

namespace magsurf {

// Second-order jet of a scalar field of (x, y): value plus first and second
// partial derivatives, propagated through arithmetic. All derivatives of
// built-in fields and expression fields are exact to rounding.
struct Jet2 {
  double v = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  double dxx = 0.0;
  double dxy = 0.0;
  double dyy = 0.0;

  static Jet2 constant(double c) { return {c, 0, 0, 0, 0, 0}; }
  static Jet2 var_x(double x) { return {x, 1, 0, 0, 0, 0}; }
  static Jet2 var_y(double y) { return {y, 0, 1, 0, 0, 0}; }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.v + b.v, a.dx + b.dx, a.dy + b.dy,
          a.dxx + b.dxx, a.dxy + b.dxy, a.dyy + b.dyy};
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  return {a.v - b.v, a.dx - b.dx, a.dy - b.dy,
          a.dxx - b.dxx, a.dxy - b.dxy, a.dyy - b.dyy};
}

inline Jet2 operator-(const Jet2& a) {
  return {-a.v, -a.dx, -a.dy, -a.dxx, -a.dxy, -a.dyy};
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.v * b.v,
          a.dx * b.v + a.v * b.dx,
          a.dy * b.v + a.v * b.dy,
          a.dxx * b.v + 2.0 * a.dx * b.dx + a.v * b.dxx,
          a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
          a.dyy * b.v + 2.0 * a.dy * b.dy + a.v * b.dyy};
}

inline Jet2 operator*(double s, const Jet2& a) {
  return {s * a.v, s * a.dx, s * a.dy, s * a.dxx, s * a.dxy, s * a.dyy};
}

inline Jet2 operator+(const Jet2& a, double c) { return a + Jet2::constant(c); }
inline Jet2 operator+(double c, const Jet2& a) { return a + Jet2::constant(c); }
inline Jet2 operator-(const Jet2& a, double c) { return a - Jet2::constant(c); }
inline Jet2 operator-(double c, const Jet2& a) { return Jet2::constant(c) - a; }

// Chain rule for h(u) with u a jet: needs h(u), h'(u), h''(u).
inline Jet2 compose(const Jet2& u, double h, double dh, double ddh) {
  return {h,
          dh * u.dx,
          dh * u.dy,
          ddh * u.dx * u.dx + dh * u.dxx,
          ddh * u.dx * u.dy + dh * u.dxy,
          ddh * u.dy * u.dy + dh * u.dyy};
}

inline Jet2 exp(const Jet2& u) {
  const double e = std::exp(u.v);
  return compose(u, e, e, e);
}

inline Jet2 log(const Jet2& u) {
  if (u.v <= 0.0) throw std::domain_error("jet log of non-positive value");
  return compose(u, std::log(u.v), 1.0 / u.v, -1.0 / (u.v * u.v));
}

inline Jet2 sin(const Jet2& u) {
  const double s = std::sin(u.v), c = std::cos(u.v);
  return compose(u, s, c, -s);
}

inline Jet2 cos(const Jet2& u) {
  const double s = std::sin(u.v), c = std::cos(u.v);
  return compose(u, c, -s, -c);
}

inline Jet2 inv(const Jet2& u) {
  if (u.v == 0.0) throw std::domain_error("jet division by zero");
  const double iv = 1.0 / u.v;
  return compose(u, iv, -iv * iv, 2.0 * iv * iv * iv);
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * inv(b); }
inline Jet2 operator/(double c, const Jet2& b) { return Jet2::constant(c) * inv(b); }
inline Jet2 operator/(const Jet2& a, double c) { return (1.0 / c) * a; }

inline Jet2 pow(const Jet2& a, const Jet2& b) {
  // Integer constant exponents are handled exactly, other cases via exp/log.
  if (b.dx == 0 && b.dy == 0 && b.dxx == 0 && b.dxy == 0 && b.dyy == 0 &&
      b.v == std::floor(b.v) && std::abs(b.v) <= 64) {
    int n = static_cast<int>(b.v);
    if (n == 0) return Jet2::constant(1.0);
    bool neg = n < 0;
    n = std::abs(n);
    Jet2 r = a;
    for (int i = 1; i < n; ++i) r = r * a;
    return neg ? inv(r) : r;
  }
  return exp(b * log(a));
}

}  // namespace magsurf

#endif
