#pragma once

#include <cmath>

namespace hoif {

// Second-order forward-mode value in two variables: value, gradient and
// Hessian entries. Fixed size, used wherever only first and second
// derivatives of a field are needed.
struct Dual2 {
  double v = 0.0, x = 0.0, y = 0.0, xx = 0.0, xy = 0.0, yy = 0.0;

  Dual2() = default;
  Dual2(double value) : v(value) {}
  Dual2(double v_, double x_, double y_, double xx_, double xy_, double yy_)
      : v(v_), x(x_), y(y_), xx(xx_), xy(xy_), yy(yy_) {}
  static Dual2 variable(int axis, double value) {
    Dual2 d(value);
    (axis == 0 ? d.x : d.y) = 1.0;
    return d;
  }
  double value() const { return v; }
};

// phi(u) given phi(u0), phi'(u0), phi''(u0).
inline Dual2 chain(const Dual2& u, double f0, double f1, double f2) {
  Dual2 r;
  r.v = f0;
  r.x = f1 * u.x;
  r.y = f1 * u.y;
  r.xx = f2 * u.x * u.x + f1 * u.xx;
  r.xy = f2 * u.x * u.y + f1 * u.xy;
  r.yy = f2 * u.y * u.y + f1 * u.yy;
  return r;
}

inline Dual2 operator+(const Dual2& a, const Dual2& b) {
  return {a.v + b.v, a.x + b.x, a.y + b.y, a.xx + b.xx, a.xy + b.xy, a.yy + b.yy};
}
inline Dual2 operator-(const Dual2& a, const Dual2& b) {
  return {a.v - b.v, a.x - b.x, a.y - b.y, a.xx - b.xx, a.xy - b.xy, a.yy - b.yy};
}
inline Dual2 operator-(const Dual2& a) { return {-a.v, -a.x, -a.y, -a.xx, -a.xy, -a.yy}; }
inline Dual2 operator*(const Dual2& a, const Dual2& b) {
  return {a.v * b.v,
          a.x * b.v + a.v * b.x,
          a.y * b.v + a.v * b.y,
          a.xx * b.v + 2.0 * a.x * b.x + a.v * b.xx,
          a.xy * b.v + a.x * b.y + a.y * b.x + a.v * b.xy,
          a.yy * b.v + 2.0 * a.y * b.y + a.v * b.yy};
}
inline Dual2 operator/(const Dual2& a, const Dual2& b) {
  const double iv = 1.0 / b.v;
  return a * chain(b, iv, -iv * iv, 2.0 * iv * iv * iv);
}
inline Dual2& operator+=(Dual2& a, const Dual2& b) { return a = a + b; }
inline Dual2& operator-=(Dual2& a, const Dual2& b) { return a = a - b; }
inline Dual2& operator*=(Dual2& a, const Dual2& b) { return a = a * b; }

inline Dual2 sin(const Dual2& u) { return chain(u, std::sin(u.v), std::cos(u.v), -std::sin(u.v)); }
inline Dual2 cos(const Dual2& u) { return chain(u, std::cos(u.v), -std::sin(u.v), -std::cos(u.v)); }
inline Dual2 tan(const Dual2& u) {
  const double t = std::tan(u.v);
  return chain(u, t, 1.0 + t * t, 2.0 * t * (1.0 + t * t));
}
inline Dual2 exp(const Dual2& u) {
  const double e = std::exp(u.v);
  return chain(u, e, e, e);
}
inline Dual2 log(const Dual2& u) { return chain(u, std::log(u.v), 1.0 / u.v, -1.0 / (u.v * u.v)); }
inline Dual2 sqrt(const Dual2& u) {
  const double s = std::sqrt(u.v);
  return chain(u, s, 0.5 / s, -0.25 / (s * u.v));
}
inline Dual2 atan(const Dual2& u) {
  const double q = 1.0 / (1.0 + u.v * u.v);
  return chain(u, std::atan(u.v), q, -2.0 * u.v * q * q);
}
inline Dual2 sinh(const Dual2& u) { return chain(u, std::sinh(u.v), std::cosh(u.v), std::sinh(u.v)); }
inline Dual2 cosh(const Dual2& u) { return chain(u, std::cosh(u.v), std::sinh(u.v), std::cosh(u.v)); }
inline Dual2 abs(const Dual2& u) { return u.v >= 0.0 ? u : -u; }
inline Dual2 pow(const Dual2& u, double p) {
  return chain(u, std::pow(u.v, p), p * std::pow(u.v, p - 1.0), p * (p - 1.0) * std::pow(u.v, p - 2.0));
}
inline Dual2 pow(const Dual2& a, const Dual2& b) { return exp(b * log(a)); }
inline Dual2 atan2(const Dual2& y, const Dual2& x) {
  Dual2 s = (std::abs(x.v) >= std::abs(y.v)) ? atan(y / x) : -atan(x / y);
  s.v = std::atan2(y.v, x.v);
  return s;
}

}  // namespace hoif
